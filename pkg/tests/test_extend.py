"""Pipeline orchestration: seeding, extension rounds, ranking."""

import itertools

import pytest

from oaenum.core import design, lex_sort_rows, verify_strength
from oaenum.extend import (
    ClassMember,
    ClassSet,
    ConsistencyError,
    default_jobs,
    enumerate_up_to,
    extend_all,
    extendable_to,
    gma_report,
    seed,
)
from oaenum.gwp import gwp_two_level
from oaenum.isomorph import design_certificate, od_expand_to_iso

from .helpers import (brute_enumerate_oas, brute_iso_classes,
                      full_factorial, half_fraction)


def certs(cs, relation="iso"):
    return {design_certificate(m.design, relation) for m in cs.members}


class TestSeed:
    def test_tiny_seed_rows(self):
        cs = seed(4, 2, 2)
        assert len(cs) == 1
        assert cs.members[0].design.rows == \
            ((0, 0), (0, 1), (1, 0), (1, 1))
        assert cs.factors == 2 and cs.strength == 2

    def test_replicated_seed(self):
        cs = seed(160, 2, 4)
        d = cs.members[0].design
        assert d.runs == 160 and d.factors == 4
        distinct = set(d.rows)
        assert len(distinct) == 16
        assert all(d.rows.count(r) == 10 for r in distinct)
        assert verify_strength(d, 4)
        assert list(d.rows) == sorted(d.rows)

    def test_non_integral_index_rejected(self):
        with pytest.raises(ValueError):
            seed(6, 2, 2)

    def test_seed_provenance(self):
        assert seed(4, 2, 2).members[0].method == "seed"


class TestClassSetInvariants:
    def test_duplicate_certificates_rejected(self):
        d = full_factorial(2, 2)
        m = ClassMember(design=d, certificate=design_certificate(d, "iso"),
                        method="seed")
        with pytest.raises(ValueError):
            ClassSet(runs=4, factors=2, levels=2, strength=2,
                     relation="oa-iso", members=(m, m))

    def test_dimension_mismatch_rejected(self):
        d = full_factorial(2, 2)
        m = ClassMember(design=d, certificate=design_certificate(d, "iso"),
                        method="seed")
        with pytest.raises(ValueError):
            ClassSet(runs=8, factors=2, levels=2, strength=2,
                     relation="oa-iso", members=(m,))

    def test_weak_member_rejected(self):
        d = design([(0, 0), (0, 1), (1, 0), (0, 1)], 2)
        m = ClassMember(design=d, certificate=design_certificate(d, "iso"),
                        method="seed")
        with pytest.raises(ValueError):
            ClassSet(runs=4, factors=2, levels=2, strength=2,
                     relation="oa-iso", members=(m,))

    def test_od_needs_two_levels(self):
        d = full_factorial(2, 3)
        m = ClassMember(design=d, certificate=design_certificate(d, "iso"),
                        method="seed")
        with pytest.raises(ValueError):
            ClassSet(runs=9, factors=2, levels=3, strength=2,
                     relation="od-equiv", members=(m,))

    def test_unknown_relation(self):
        with pytest.raises(ValueError):
            ClassSet(runs=4, factors=2, levels=2, strength=2,
                     relation="families", members=())


class TestExtendAll:
    def test_tiny_chain(self):
        t3 = extend_all(seed(4, 2, 2))
        assert len(t3) == 1 and t3.factors == 3
        t4 = extend_all(t3)
        assert len(t4) == 0 and t4.factors == 4

    def test_empty_input_is_fine(self):
        t4 = extend_all(extend_all(seed(4, 2, 2)))
        assert len(t4) == 0
        t5 = extend_all(t4)
        assert len(t5) == 0 and t5.factors == 5

    @pytest.mark.parametrize("method", ["identity", "full-refilter",
                                        "compressed"])
    def test_methods_agree_at_8_runs(self, method):
        t3 = extend_all(seed(8, 2, 2), method=method)
        t4 = extend_all(t3, method=method)
        want3 = brute_iso_classes(list(brute_enumerate_oas(8, 3, 2, 2)))
        want4 = brute_iso_classes(list(brute_enumerate_oas(8, 4, 2, 2)))
        assert len(t3) == want3
        assert len(t4) == want4

    def test_pruning_off_matches_orbit(self):
        a = extend_all(seed(8, 2, 2), pruning="off")
        b = extend_all(seed(8, 2, 2), pruning="orbit")
        assert certs(a) == certs(b)

    def test_od_reduction_expands_back(self):
        t3 = extend_all(seed(8, 2, 2), reduce="oa-iso")
        t3od = extend_all(seed(8, 2, 2), reduce="od-equiv")
        assert len(t3od) <= len(t3)
        expanded = od_expand_to_iso(t3od.designs())
        assert {design_certificate(d, "iso") for d in expanded} == certs(t3)

    def test_od_requires_two_levels(self):
        with pytest.raises(ValueError):
            extend_all(seed(9, 3, 2), reduce="od-equiv")

    def test_bad_arguments(self):
        cs = seed(4, 2, 2)
        with pytest.raises(ValueError):
            extend_all(cs, method="magic")
        with pytest.raises(ValueError):
            extend_all(cs, reduce="none")
        with pytest.raises(ValueError):
            extend_all(cs, pruning="maybe")
        with pytest.raises(ValueError):
            extend_all(cs, jobs=0)

    def test_parallel_matches_serial(self):
        t3 = extend_all(seed(8, 2, 2))
        serial = extend_all(t3, jobs=1)
        parallel = extend_all(t3, jobs=2)
        assert certs(serial) == certs(parallel)

    def test_corrupt_decode_aborts(self, monkeypatch):
        import oaenum.extend as ex

        class BadProblem:
            def __init__(self, prob):
                self.system = prob.system
                self.kind = prob.kind
                self.factors = prob.factors
                self._prob = prob

            def decode(self, vec):
                d = self._prob.decode(vec)
                rows = list(d.rows)
                rows[0] = rows[0][:-1] + (1 - rows[0][-1],)
                return design(rows, d.levels)

        real = ex._BUILDERS["compressed"]
        monkeypatch.setitem(ex._BUILDERS, "compressed",
                            lambda d, t: BadProblem(real(d, t)))
        with pytest.raises(ConsistencyError):
            extend_all(seed(4, 2, 2), method="compressed")


class TestEnumerateUpTo:
    def test_tiny_family_exhausts(self):
        sets = enumerate_up_to(4, 2, 2, 8)
        assert [(c.factors, len(c)) for c in sets] == \
            [(2, 1), (3, 1), (4, 0)]

    def test_stops_at_k_stop(self):
        sets = enumerate_up_to(8, 2, 2, 3)
        assert sets[-1].factors == 3

    def test_k_stop_below_strength(self):
        with pytest.raises(ValueError):
            enumerate_up_to(8, 2, 2, 1)


class TestExtendableTo:
    def test_self_extension_is_trivial(self):
        d = full_factorial(3, 2)
        assert extendable_to(d, 2, 3)

    def test_factorial_reaches_its_bound(self):
        d = full_factorial(2, 2)
        assert extendable_to(d, 2, 3)
        assert not extendable_to(d, 2, 4)

    def test_target_below_input_rejected(self):
        with pytest.raises(ValueError):
            extendable_to(full_factorial(3, 2), 2, 2)


class TestDefaultJobs:
    def test_env_read(self, monkeypatch):
        monkeypatch.setenv("OAENUM_JOBS", "3")
        assert default_jobs() == 3

    def test_default_is_one(self, monkeypatch):
        monkeypatch.delenv("OAENUM_JOBS", raising=False)
        assert default_jobs() == 1

    def test_bad_values(self, monkeypatch):
        monkeypatch.setenv("OAENUM_JOBS", "many")
        with pytest.raises(ValueError):
            default_jobs()
        monkeypatch.setenv("OAENUM_JOBS", "0")
        with pytest.raises(ValueError):
            default_jobs()


class TestGmaReport:
    def test_singleton_is_gma(self):
        rep = gma_report(seed(8, 2, 2))
        assert len(rep.entries) == 1
        assert rep.entries[0].gma

    def test_ranking_sorted_by_pattern(self):
        t4 = extend_all(extend_all(seed(8, 2, 2)))
        rep = gma_report(t4)
        patterns = [e.gwp.values for e in rep.entries]
        assert patterns == sorted(patterns)
        assert rep.entries[0].gma
        # the flagged subset is exactly the minimum pattern
        best = patterns[0]
        assert all(e.gma == (e.gwp.values == best) for e in rep.entries)

    def test_gwp_matches_direct_computation(self):
        t4 = extend_all(extend_all(seed(8, 2, 2)))
        rep = gma_report(t4)
        for e in rep.entries:
            assert e.gwp.values == gwp_two_level(e.member.design).values

    def test_report_lines_format(self):
        rep = gma_report(seed(4, 2, 2))
        lines = rep.lines()
        assert len(lines) == 1
        assert "GMA" in lines[0]
        assert "B=(" in lines[0]
