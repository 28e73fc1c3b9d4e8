import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scldpc.cycles import (
    ProtoCycle,
    build_window,
    census_active_counts,
    count_ugast_3330,
    enumerate_cycles,
    girth_check,
    lift_count,
)
from scldpc.overlap import cycle6_census, realize_mask, solve_optimal_overlap
from scldpc.qc import PartitionMask, ProtoMatrix, build_ab_powers, couple

from oracles import build_lifted_dense, dfs_count_cycles


def random_binary_matrix(rows, cols, density, seed):
    rng = np.random.default_rng(seed)
    return (rng.random((rows, cols)) < density).astype(np.int8)


class TestEnumerateCycles:
    def test_all_ones_3x3_has_six_6cycles(self):
        m = np.ones((3, 3), dtype=np.int8)
        assert len(enumerate_cycles(m, 6)) == 6
        assert dfs_count_cycles(m, 6) == 6

    def test_zero_row_changes_nothing(self):
        m = random_binary_matrix(4, 6, 0.6, seed=0)
        with_zero = np.vstack([m, np.zeros((1, 6), dtype=np.int8)])
        for length in (4, 6):
            assert len(enumerate_cycles(m, length)) == len(enumerate_cycles(with_zero, length))

    def test_unsupported_length(self):
        with pytest.raises(ValueError):
            enumerate_cycles(np.ones((2, 2)), 8)

    def test_cycles_are_unique(self):
        m = random_binary_matrix(5, 8, 0.5, seed=3)
        cycles = enumerate_cycles(m, 6)
        assert len({c.entries for c in cycles}) == len(cycles)

    def test_entries_alternate_and_close(self):
        m = random_binary_matrix(5, 8, 0.5, seed=4)
        for cyc in enumerate_cycles(m, 6):
            e = cyc.entries
            for idx in range(0, 6, 2):
                assert e[idx][0] == e[idx + 1][0]  # row shared
                assert e[idx + 1][1] == e[(idx + 2) % 6][1]  # column shared

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_counts_match_dfs_oracle(self, seed):
        m = random_binary_matrix(5, 7, 0.55, seed=seed)
        for length in (4, 6):
            assert len(enumerate_cycles(m, length)) == dfs_count_cycles(m, length)

    def test_oo_protograph_count_1170(self):
        sol = solve_optimal_overlap(7, 30)
        mask = realize_mask(sol.optima[0], 7, seed=1)
        proto1 = ProtoMatrix(gamma=3, kappa=7, p=1, powers=((0,) * 7,) * 3)
        H = build_lifted_dense(3, 7, 1, proto1.powers, mask.assign, 30)
        assert len(enumerate_cycles(H, 6)) == 1170


class TestLiftCount:
    def test_equal_powers_are_active(self):
        proto = ProtoMatrix(gamma=3, kappa=3, p=5, powers=((2, 2, 2),) * 3)
        cyc = enumerate_cycles(np.ones((3, 3)), 6)[0]
        active, beta = lift_count(cyc, proto)
        assert active and beta == 1

    def test_prime_p_forces_beta_p(self):
        powers = ((0, 0, 0), (0, 1, 0), (0, 0, 0))
        proto = ProtoMatrix(gamma=3, kappa=3, p=7, powers=powers)
        for cyc in enumerate_cycles(np.ones((3, 3)), 6):
            active, beta = lift_count(cyc, proto)
            assert active or beta == 7

    @pytest.mark.parametrize("p", [5, 7])
    def test_lift_counts_on_sub_support(self, p):
        # for each proto 6-cycle, the lift restricted to its six circulants is
        # 2-regular: active -> p hexagons; inactive -> p/beta cycles of 6*beta
        rng = random.Random(p)
        checked = 0
        while checked < 40:
            powers = tuple(tuple(rng.randrange(p) for _ in range(3)) for _ in range(3))
            proto = ProtoMatrix(gamma=3, kappa=3, p=p, powers=powers)
            for cyc in enumerate_cycles(np.ones((3, 3)), 6):
                active, beta = lift_count(cyc, proto)
                lengths = self._lifted_component_lengths(cyc, proto)
                if active:
                    assert lengths == [6] * p
                else:
                    assert lengths == [6 * beta] * (p // beta)
                # conservation: total lifted edges-per-cycle x count = p x 6
                assert sum(lengths) == 6 * p
                checked += 1

    @staticmethod
    def _lifted_component_lengths(cyc: ProtoCycle, proto: ProtoMatrix) -> list[int]:
        p = proto.p
        # walk each lift offset around the proto cycle until it returns
        deltas = []
        for e in range(3):
            r_a, c_a = cyc.entries[2 * e]
            r_b, c_b = cyc.entries[2 * e + 1]
            deltas.append(proto.powers[r_a][c_a] - proto.powers[r_b][c_b])
        step = sum(deltas) % p
        lengths = []
        seen = set()
        for s in range(p):
            if s in seen:
                continue
            orbit = 0
            v = s
            while True:
                seen.add(v)
                orbit += 1
                v = (v + step) % p
                if v == s:
                    break
            lengths.append(6 * orbit)
        return sorted(lengths)


class TestUgastCensus:
    @pytest.mark.parametrize(
        "kp,expected", [(7, 8820), (11, 36300), (13, 60840), (17, 138720)]
    )
    def test_uncoupled_array_based(self, kp, expected):
        proto = build_ab_powers(3, kp)
        code = couple(proto, PartitionMask.all_h0(3, kp), 30)
        assert count_ugast_3330(code) == expected

    def test_small_code_matches_direct_lifted_enumeration(self):
        proto = build_ab_powers(3, 5)
        import random as _r

        rng = _r.Random(0)
        for seed in range(4):
            mask = PartitionMask(
                tuple(tuple(rng.randrange(2) for _ in range(5)) for _ in range(3))
            )
            code = couple(proto, mask, 2)
            H = build_lifted_dense(3, 5, 5, proto.powers, mask.assign, 2)
            assert count_ugast_3330(code) == dfs_count_cycles(H, 6)

    def test_wrong_gamma_rejected(self):
        proto = ProtoMatrix(gamma=2, kappa=3, p=5, powers=((0, 1, 2), (0, 2, 4)))
        mask = PartitionMask(((0, 0, 0), (0, 0, 0)))
        with pytest.raises(ValueError):
            count_ugast_3330(couple(proto, mask, 2))

    def test_census_fast_path_agrees_with_window(self):
        proto = build_ab_powers(3, 7)
        import random as _r

        rng = _r.Random(5)
        for _ in range(5):
            mask = PartitionMask(
                tuple(tuple(rng.randrange(2) for _ in range(7)) for _ in range(3))
            )
            win = build_window(proto, mask)
            flat = win.flat_powers(proto.powers)
            assert win.active_counts(flat) == census_active_counts(proto, mask)


class TestGirth:
    def test_array_based_has_no_4cycles(self):
        for kp in (5, 7, 13):
            proto = build_ab_powers(3, kp)
            code = couple(proto, PartitionMask.all_h0(3, kp), 3)
            assert girth_check(code) >= 6

    def test_coupling_preserves_4cycle_freedom(self):
        # coupling only removes edges: a 4-cycle-free block lift stays
        # 4-cycle-free under every partition
        import random as _r

        rng = _r.Random(2)
        proto = build_ab_powers(3, 7)
        for _ in range(20):
            mask = PartitionMask(
                tuple(tuple(rng.randrange(2) for _ in range(7)) for _ in range(3))
            )
            assert girth_check(couple(proto, mask, 4)) >= 6

    def test_active_4cycle_detected(self):
        # equal powers on a 2x2 block force an active 4-cycle
        powers = ((0, 0, 0, 0, 0), (0, 0, 1, 2, 3), (0, 2, 4, 1, 3))
        proto = ProtoMatrix(gamma=3, kappa=5, p=5, powers=powers)
        code = couple(proto, PartitionMask.all_h0(3, 5), 2)
        assert girth_check(code) == 4
        H = build_lifted_dense(3, 5, 5, powers, PartitionMask.all_h0(3, 5).assign, 2)
        assert dfs_count_cycles(H, 4) > 0

    def test_girth_above_6_when_no_active_6cycle(self):
        # kappa=2 protograph cannot host a 6-cycle at all
        proto = ProtoMatrix(gamma=3, kappa=2, p=5, powers=((0, 0), (0, 1), (0, 3)))
        code = couple(proto, PartitionMask(((0, 1), (0, 1), (0, 1))), 3)
        assert girth_check(code) == math.inf


class TestWindowDecomposition:
    @pytest.mark.parametrize("L", [2, 3, 4])
    def test_window_multiplicities_match_whole_graph(self, L):
        # structural count: L x one-replica + (L-1) x two-replica
        import random as _r

        rng = _r.Random(L)
        kappa = 5
        proto1 = ProtoMatrix(gamma=3, kappa=kappa, p=1, powers=((0,) * kappa,) * 3)
        for _ in range(5):
            mask = PartitionMask(
                tuple(tuple(rng.randrange(2) for _ in range(kappa)) for _ in range(3))
            )
            win = build_window(proto1, mask)
            fs, fd = win.structural_counts6()
            H = build_lifted_dense(3, kappa, 1, proto1.powers, mask.assign, L)
            assert L * fs + (L - 1) * fd == dfs_count_cycles(H, 6)

    def test_formula_census_equals_window_census_at_p1(self):
        kappa = 6
        sol = solve_optimal_overlap(kappa, 4)
        for vec in sol.optima[:3]:
            mask = realize_mask(vec, kappa, seed=0)
            proto1 = ProtoMatrix(gamma=3, kappa=kappa, p=1, powers=((0,) * kappa,) * 3)
            win = build_window(proto1, mask)
            fs, fd = win.structural_counts6()
            census = cycle6_census(vec, kappa, 4)
            assert (fs, fd) == (census.fs, census.fd)

    def test_every_window_cycle_in_exactly_one_case(self):
        import random as _r

        rng = _r.Random(11)
        proto = build_ab_powers(3, 7)
        mask = PartitionMask(
            tuple(tuple(rng.randrange(2) for _ in range(7)) for _ in range(3))
        )
        win = build_window(proto, mask)
        cycles = win.proto_cycles6()
        assert len(cycles) == win.coef6.shape[0]
        singles = [c for c in cycles if c.span == 1]
        duals = [c for c in cycles if c.span == 2]
        assert all(c.case in {"s0", "s1", "s2", "s3"} for c in singles)
        assert all(c.case in {"d_top", "d_bot", "d_mid21", "d_mid12"} for c in duals)

    def test_case_counts_match_formula_components(self):
        kappa = 6
        sol = solve_optimal_overlap(kappa, 3)
        vec = sol.optima[0]
        mask = realize_mask(vec, kappa, seed=2)
        proto1 = ProtoMatrix(gamma=3, kappa=kappa, p=1, powers=((0,) * kappa,) * 3)
        win = build_window(proto1, mask)
        census = cycle6_census(vec, kappa, 3)
        from collections import Counter

        tags = Counter(c.case for c in win.proto_cycles6() if c.span == 1)
        # single-replica tags appear once per replica copy
        assert tags["s0"] == 2 * census.single[0]
        assert tags["s1"] == 2 * census.single[1]
        assert tags["s2"] == 2 * census.single[2]
        assert tags["s3"] == 2 * census.single[3]
        dual_tags = Counter(c.case for c in win.proto_cycles6() if c.span == 2)
        assert dual_tags["d_mid12"] == census.cross[0]
        assert dual_tags["d_mid21"] == census.cross[1]
        assert dual_tags["d_top"] == census.cross[2]
        assert dual_tags["d_bot"] == census.cross[3]
