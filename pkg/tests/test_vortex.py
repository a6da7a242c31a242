"""Governance: thresholds, pool flow, voting, veto, tiers, delegation.

Threshold formulas are checked against brute-force enumeration of the
decision procedure for every eligible-power value in a dense range and
spot-checked beyond.
"""

import pytest

from bionode.slashing import PerpetrationKind
from bionode.vortex import (
    MONTH_SECONDS,
    WEEK_SECONDS,
    YEAR_SECONDS,
    ConsulApprovalMissing,
    DelegationDepthExceeded,
    DuplicatePoolVote,
    DuplicateVote,
    GovernorRecord,
    NotApproved,
    NotGovernor,
    NotNominated,
    ProposalState,
    ProposalType,
    ResubmitTooSoon,
    Role,
    Tier,
    TierInsufficient,
    TooManyOpenProposals,
    VetoExhausted,
    Vortex,
    VotingStillOpen,
    approval_threshold,
    ceil_share,
    decide,
    min_approving_yes,
    pool_threshold,
    quorum_threshold,
    tier_promotion,
    voting_power,
)


def make_dao(n_governors: int, tier: Tier = Tier.Citizen) -> Vortex:
    dao = Vortex()
    for i in range(n_governors):
        node = f"g{i:04d}"
        dao.register_human_node(node, now=0)
        record = dao.promote_to_governor(node, now=0)
        record.tier = tier
        record.has_approved_proposal = True
    return dao


def drive_to_vote(dao: Vortex, proposal_id: str, now: int = 0) -> None:
    needed = pool_threshold(dao.governor_count())
    voters = sorted(
        nid for nid, r in dao.governors.items() if r.role is Role.Governor
    )[:needed]
    for v in voters:
        dao.pool_vote(v, proposal_id, upvote=True, now=now)


class TestThresholds:
    def test_headline_numbers_for_100(self):
        assert quorum_threshold(100) == 33
        assert approval_threshold(33) == 22
        assert min_approving_yes(100) == 22

    def test_veto_threshold_of_three(self):
        assert ceil_share(pytest.importorskip("fractions").Fraction(66, 100), 3) == 2

    def test_pool_threshold_100(self):
        assert pool_threshold(100) == 22

    def test_decide_cases_from_formula(self):
        assert decide(100, 33, 22) == (True, True)
        assert decide(100, 32, 32) == (False, False)
        assert decide(100, 33, 21) == (True, False)

    def test_formula_matches_enumeration_dense(self):
        """Brute-force the smallest approving yes over all cast sizes."""
        for n in range(3, 301):
            best = None
            for cast in range(0, n + 1):
                for yes in range(0, cast + 1):
                    quorum, approved = decide(n, cast, yes)
                    if approved:
                        best = yes if best is None else min(best, yes)
                        break  # yes grows within cast loop; first hit is minimal
            assert best == min_approving_yes(n), n

    def test_formula_spot_checks_large(self):
        for n in (1000, 4567, 9999, 10000):
            q = quorum_threshold(n)
            y = approval_threshold(q)
            assert decide(n, q, y) == (True, True)
            assert not decide(n, q, y - 1)[1]
            assert not decide(n, q - 1, q - 1)[1]
            assert min_approving_yes(n) == y


class TestSubmission:
    def test_citizen_product_accepted(self):
        dao = make_dao(5)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        assert p.state is ProposalState.InPool

    def test_citizen_monetary_rejected_and_slashed(self):
        dao = make_dao(5)
        with pytest.raises(TierInsufficient):
            dao.submit_proposal("g0000", ProposalType.Monetary, now=0)
        assert dao.pending_perpetrations == [
            ("g0000", PerpetrationKind.MismatchedProposalTypeNoRight)
        ]

    def test_senator_fee_distribution_allowed(self):
        dao = make_dao(5, tier=Tier.Senator)
        p = dao.submit_proposal("g0000", ProposalType.FeeDistribution, now=0)
        assert p.state is ProposalState.InPool

    def test_vortex_core_needs_consul(self):
        dao = make_dao(5, tier=Tier.Legate)
        with pytest.raises(TierInsufficient):
            dao.submit_proposal("g0000", ProposalType.VortexCore, now=0)

    def test_sixth_open_proposal_rejected(self):
        dao = make_dao(5)
        for _ in range(5):
            dao.submit_proposal("g0000", ProposalType.Product, now=0)
        with pytest.raises(TooManyOpenProposals):
            dao.submit_proposal("g0000", ProposalType.Product, now=0)

    def test_non_human_needs_nomination(self):
        dao = make_dao(3)
        with pytest.raises(NotNominated):
            dao.submit_proposal("contract-7", ProposalType.Product, now=0)
        p = dao.submit_proposal(
            "contract-7", ProposalType.Product, now=0, nominated_by="g0000"
        )
        assert p.state is ProposalState.InPool

    def test_plain_human_node_gets_citizen_rights(self):
        dao = make_dao(3)
        dao.register_human_node("plain", now=0)
        assert dao.submit_proposal("plain", ProposalType.Product, now=0)
        with pytest.raises(TierInsufficient):
            dao.submit_proposal("plain", ProposalType.Monetary, now=0)

    def test_reports_use_pseudonym(self):
        dao = make_dao(3)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        assert "g0000" not in p.pseudonym


class TestPool:
    def test_twenty_second_vote_conveys_to_vortex(self):
        dao = make_dao(100)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        voters = sorted(dao.governors)[:22]
        for i, v in enumerate(voters):
            assert p.state is ProposalState.InPool
            dao.pool_vote(v, p.id, upvote=(i % 2 == 0), now=5)
        assert p.state is ProposalState.InVote
        assert p.vote_deadline == 5 + WEEK_SECONDS

    def test_duplicate_pool_vote(self):
        dao = make_dao(100)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        dao.pool_vote("g0001", p.id, True, now=0)
        with pytest.raises(DuplicatePoolVote):
            dao.pool_vote("g0001", p.id, False, now=0)

    def test_non_governor_cannot_pool_vote(self):
        dao = make_dao(10)
        dao.register_human_node("plain", now=0)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        with pytest.raises(NotGovernor):
            dao.pool_vote("plain", p.id, True, now=0)

    def test_pool_timeout_expires_with_cooldown(self):
        dao = make_dao(100)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        late = 2 * WEEK_SECONDS + 1
        dao.expire_stale(now=late)
        assert p.state is ProposalState.Expired
        assert p.resubmit_eligible_at == late + 2 * WEEK_SECONDS
        with pytest.raises(ResubmitTooSoon):
            dao.submit_proposal("g0000", ProposalType.Product, now=late, resubmit_of=p.id)
        again = dao.submit_proposal(
            "g0000", ProposalType.Product, now=late + 2 * WEEK_SECONDS, resubmit_of=p.id
        )
        assert again.state is ProposalState.InPool

    def test_pool_max_times_by_type(self):
        from bionode.vortex import POOL_MAX_SECONDS

        assert POOL_MAX_SECONDS[ProposalType.Product] == 2 * WEEK_SECONDS
        assert POOL_MAX_SECONDS[ProposalType.FeeDistribution] == MONTH_SECONDS
        assert POOL_MAX_SECONDS[ProposalType.Monetary] == MONTH_SECONDS
        assert POOL_MAX_SECONDS[ProposalType.Protocol] == 2 * MONTH_SECONDS
        assert POOL_MAX_SECONDS[ProposalType.Administrative] == 3 * MONTH_SECONDS
        assert POOL_MAX_SECONDS[ProposalType.VortexCore] == 6 * MONTH_SECONDS


class TestVoting:
    def run_vote(self, n, yes_count, no_count):
        dao = make_dao(n)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        drive_to_vote(dao, p.id, now=0)
        ids = sorted(dao.governors)
        for v in ids[:yes_count]:
            dao.cast_vote(v, p.id, yes=True, now=1)
        for v in ids[yes_count : yes_count + no_count]:
            dao.cast_vote(v, p.id, yes=False, now=1)
        return dao, p, dao.tally(p.id, now=WEEK_SECONDS + 1)

    def test_minimum_approving_configuration(self):
        dao, p, result = self.run_vote(100, 22, 11)  # 33 cast, 22 yes
        assert result.quorum_met and result.approved
        assert p.state is ProposalState.Approved
        assert dao.governors["g0000"].has_approved_proposal

    def test_quorum_missed_at_32(self):
        _, p, result = self.run_vote(100, 32, 0)
        assert not result.quorum_met and not result.approved
        assert p.state is ProposalState.Declined

    def test_21_of_33_declined(self):
        _, p, result = self.run_vote(100, 21, 12)
        assert result.quorum_met and not result.approved

    def test_tally_before_deadline_raises(self):
        dao = make_dao(10)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        drive_to_vote(dao, p.id)
        with pytest.raises(VotingStillOpen):
            dao.tally(p.id, now=10)

    def test_duplicate_vote(self):
        dao = make_dao(10)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        drive_to_vote(dao, p.id)
        dao.cast_vote("g0001", p.id, True, now=1)
        with pytest.raises(DuplicateVote):
            dao.cast_vote("g0001", p.id, False, now=2)

    def test_adding_yes_never_flips_to_declined(self):
        for extra_yes in range(0, 66):
            dao = make_dao(100)
            p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
            drive_to_vote(dao, p.id)
            ids = sorted(dao.governors)
            for v in ids[: 22 + extra_yes]:
                dao.cast_vote(v, p.id, True, now=1)
            for v in ids[22 + extra_yes : 33 + extra_yes]:
                dao.cast_vote(v, p.id, False, now=1)
            assert dao.tally(p.id, now=WEEK_SECONDS).approved, extra_yes


class TestDelegation:
    def test_power_is_one_plus_delegations(self):
        dao = make_dao(8)
        assert voting_power(dao.governors["g0000"]) == 1
        for i in range(1, 6):
            dao.delegate(f"g{i:04d}", "g0000")
        assert voting_power(dao.governors["g0000"]) == 6

    def test_redelegation_is_instant(self):
        dao = make_dao(5)
        dao.delegate("g0001", "g0000")
        assert voting_power(dao.governors["g0000"]) == 2
        dao.delegate("g0001", "g0002")
        assert voting_power(dao.governors["g0000"]) == 1
        assert voting_power(dao.governors["g0002"]) == 2

    def test_depth_one_enforced(self):
        dao = make_dao(5)
        dao.delegate("g0001", "g0000")
        with pytest.raises(DelegationDepthExceeded):
            dao.delegate("g0002", "g0001")  # delegatee is a Delegator
        with pytest.raises(DelegationDepthExceeded):
            dao.delegate("g0000", "g0003")  # delegator holds delegations

    def test_power_conservation(self):
        dao = make_dao(10)
        dao.delegate("g0001", "g0000")
        dao.delegate("g0002", "g0000")
        dao.delegate("g0004", "g0003")
        total = sum(
            voting_power(r) for r in dao.governors.values() if r.role is Role.Governor
        )
        participants = sum(
            1 for r in dao.governors.values() if r.role in (Role.Governor, Role.Delegator)
        )
        assert total == participants == 10

    def test_delegated_power_counts_in_tally(self):
        dao = make_dao(10)
        for i in range(1, 7):
            dao.delegate(f"g{i:04d}", "g0000")
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        # only 4 governors remain; threshold computed over them
        drive_to_vote(dao, p.id)
        dao.cast_vote("g0000", p.id, True, now=1)  # power 7 of eligible 10
        result = dao.tally(p.id, now=WEEK_SECONDS)
        assert result.eligible_power == 10
        assert result.votes_cast == 7 and result.yes == 7
        assert result.approved

    def test_delegators_cannot_vote_directly(self):
        dao = make_dao(6)
        dao.delegate("g0001", "g0000")
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        drive_to_vote(dao, p.id)
        with pytest.raises(NotGovernor):
            dao.cast_vote("g0001", p.id, True, now=1)


class TestVeto:
    def approved_proposal(self, dao):
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        drive_to_vote(dao, p.id)
        for v in sorted(dao.governors)[: dao.governor_count()]:
            dao.cast_vote(v, p.id, True, now=1)
        dao.tally(p.id, now=WEEK_SECONDS)
        return p

    def test_two_of_three_consuls_veto(self):
        dao = make_dao(9)
        p = self.approved_proposal(dao)
        result = dao.veto(p.id, consul_yes=2, consul_total=3)
        assert result.vetoed
        assert p.state is ProposalState.Declined

    def test_one_of_three_insufficient(self):
        dao = make_dao(9)
        p = self.approved_proposal(dao)
        assert not dao.veto(p.id, consul_yes=1, consul_total=3).vetoed
        assert p.state is ProposalState.Approved

    def test_third_approval_cannot_be_vetoed(self):
        dao = make_dao(9)
        p = self.approved_proposal(dao)
        p.approval_count = 3
        with pytest.raises(VetoExhausted):
            dao.veto(p.id, consul_yes=3, consul_total=3)

    def test_unapproved_cannot_be_vetoed(self):
        dao = make_dao(9)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        with pytest.raises(NotApproved):
            dao.veto(p.id, consul_yes=3, consul_total=3)


class TestTiers:
    def record(self, years, formation=True, approved=True):
        return GovernorRecord(
            node_id="n",
            role=Role.Governor,
            governing_since=0,
            formation_participant=formation,
            has_approved_proposal=approved,
        )

    def test_two_years_formation_gives_legate(self):
        r = self.record(2)
        assert tier_promotion(r, now=2 * YEAR_SECONDS) is Tier.Legate

    def test_one_year_no_formation_gives_senator(self):
        r = self.record(1, formation=False)
        assert tier_promotion(r, now=1 * YEAR_SECONDS) is Tier.Senator

    def test_four_years_formation_gives_consul(self):
        r = self.record(4)
        assert tier_promotion(r, now=4 * YEAR_SECONDS) is Tier.Consul

    def test_no_approved_proposal_blocks_promotion(self):
        r = self.record(4, approved=False)
        assert tier_promotion(r, now=4 * YEAR_SECONDS) is Tier.Citizen

    def test_promotion_monotone_in_time(self):
        r = self.record(0)
        tiers = [tier_promotion(r, now=y * YEAR_SECONDS).value for y in range(6)]
        assert tiers == sorted(tiers)


class TestActivitySweep:
    def test_inactive_governor_demoted(self):
        dao = make_dao(4)
        dao.governors["g0000"].active_this_month = True
        demoted = dao.monthly_activity_sweep(now=MONTH_SECONDS)
        assert set(demoted) == {"g0001", "g0002", "g0003"}
        assert dao.governors["g0001"].role is Role.HumanNode

    def test_single_vote_keeps_governor(self):
        dao = make_dao(10)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        drive_to_vote(dao, p.id)
        assert dao.governors["g0001"].active_this_month
        demoted = dao.monthly_activity_sweep(now=MONTH_SECONDS)
        assert "g0001" not in demoted

    def test_quorum_denominator_shrinks(self):
        dao = make_dao(10)
        before = dao.eligible_power()
        dao.monthly_activity_sweep(now=MONTH_SECONDS)
        assert dao.eligible_power() < before

    def test_demotion_dissolves_received_delegations(self):
        dao = make_dao(5)
        dao.delegate("g0001", "g0000")
        dao.monthly_activity_sweep(now=MONTH_SECONDS)
        assert dao.governors["g0000"].role is Role.HumanNode
        assert dao.governors["g0001"].role is Role.Governor
        assert dao.governors["g0001"].delegated_to is None


class TestFormation:
    def approved(self, dao):
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        drive_to_vote(dao, p.id)
        for v in sorted(dao.governors):
            dao.cast_vote(v, p.id, True, now=1)
        dao.tally(p.id, now=WEEK_SECONDS)
        return p

    def test_year_five_no_consul_gate(self):
        dao = make_dao(6)
        p = self.approved(dao)
        grant = dao.route_to_formation(
            p.id, consul_yes=0, consul_total=3,
            network_age_seconds=5 * YEAR_SECONDS, vault_balance=777,
        )
        assert not grant.consul_gated
        assert grant.vault_balance == 777

    def test_year_one_with_consuls(self):
        dao = make_dao(6)
        p = self.approved(dao)
        grant = dao.route_to_formation(
            p.id, consul_yes=2, consul_total=3,
            network_age_seconds=1 * YEAR_SECONDS, vault_balance=10,
        )
        assert grant.consul_gated

    def test_year_one_below_threshold(self):
        dao = make_dao(6)
        p = self.approved(dao)
        with pytest.raises(ConsulApprovalMissing):
            dao.route_to_formation(
                p.id, consul_yes=1, consul_total=3,
                network_age_seconds=1 * YEAR_SECONDS, vault_balance=10,
            )


class TestStateMachine:
    def test_no_illegal_transitions(self):
        dao = make_dao(100)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        seen = [p.state]
        drive_to_vote(dao, p.id)
        seen.append(p.state)
        for v in sorted(dao.governors)[:40]:
            dao.cast_vote(v, p.id, True, now=1)
        dao.tally(p.id, now=WEEK_SECONDS)
        seen.append(p.state)
        assert seen == [ProposalState.InPool, ProposalState.InVote, ProposalState.Approved]

    def test_votes_on_expired_proposal_rejected(self):
        from bionode.vortex import ProposalNotActive

        dao = make_dao(100)
        p = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        dao.expire_stale(now=3 * WEEK_SECONDS)
        with pytest.raises(ProposalNotActive):
            dao.pool_vote("g0001", p.id, True, now=3 * WEEK_SECONDS)


class TestPoolBoards:
    def test_orderings(self):
        dao = make_dao(50)
        a = dao.submit_proposal("g0000", ProposalType.Product, now=0)
        b = dao.submit_proposal("g0001", ProposalType.Product, now=100)
        c = dao.submit_proposal("g0002", ProposalType.Product, now=200)
        dao.pool_vote("g0003", b.id, True, now=300)
        dao.pool_vote("g0004", b.id, True, now=300)
        dao.pool_vote("g0003", c.id, False, now=300)
        boards = dao.pool_boards(now=400)
        assert boards["fresh"] == [c.pseudonym, b.pseudonym, a.pseudonym]
        assert boards["trending"][0] == b.pseudonym
        assert boards["popular"][0] == b.pseudonym
        # only pool-state proposals appear
        assert set(boards["fresh"]) == {a.pseudonym, b.pseudonym, c.pseudonym}
