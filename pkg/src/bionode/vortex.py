"""Vortex: the governance state machine.

Human nodes earn the Governor role by getting a proposal approved;
Governors submit proposals to an anonymous pool, pull them into a vote
once enough of them up/downvote, vote for a strict week, and can delegate
their single vote to another Governor (depth one, instantly revocable).
Consuls can veto an approved decision at most twice; a third approval
stands. Approved proposals that need funding route to Formation, which for
the network's first four years additionally requires Consul approval.

All thresholds ("at least 33%", "66%", "22%") are ceilings of exact
rationals. Quorum and approval are measured in voting power: a Governor
counts 1 plus the delegations they currently hold, so every participating
human node contributes exactly one unit somewhere.

Time is integer seconds; the machine is single-writer and never consults
a clock of its own.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .slashing import PerpetrationKind

WEEK_SECONDS = 604_800
MONTH_SECONDS = 2_630_016  # 30.44 days
YEAR_SECONDS = 31_557_600  # 365.25 days
RESUBMIT_COOLDOWN = 2 * WEEK_SECONDS
MAX_OPEN_PROPOSALS = 5

POOL_SHARE = Fraction(22, 100)
QUORUM_SHARE = Fraction(33, 100)
APPROVAL_SHARE = Fraction(66, 100)
VETO_SHARE = Fraction(66, 100)
FORMATION_CONSUL_GATE_SECONDS = 4 * YEAR_SECONDS


class VortexError(Exception):
    pass


class TierInsufficient(VortexError):
    pass


class TooManyOpenProposals(VortexError):
    pass


class NotNominated(VortexError):
    pass


class NotGovernor(VortexError):
    pass


class DuplicatePoolVote(VortexError):
    pass


class DuplicateVote(VortexError):
    pass


class ProposalNotActive(VortexError):
    pass


class ResubmitTooSoon(VortexError):
    pass


class VotingStillOpen(VortexError):
    pass


class NotApproved(VortexError):
    pass


class VetoExhausted(VortexError):
    pass


class ConsulApprovalMissing(VortexError):
    pass


class DelegationDepthExceeded(VortexError):
    pass


class Role(Enum):
    HumanNode = "HumanNode"
    Governor = "Governor"
    Delegator = "Delegator"


class Tier(Enum):
    Citizen = 1
    Senator = 2
    Legate = 3
    Consul = 4


class ProposalType(Enum):
    Product = "Product"
    FeeDistribution = "FeeDistribution"
    Monetary = "Monetary"
    Protocol = "Protocol"
    Administrative = "Administrative"
    VortexCore = "VortexCore"


class ProposalState(Enum):
    InPool = "InPool"
    InVote = "InVote"
    Approved = "Approved"
    Declined = "Declined"
    Expired = "Expired"


POOL_MAX_SECONDS = {
    ProposalType.Product: 2 * WEEK_SECONDS,
    ProposalType.FeeDistribution: MONTH_SECONDS,
    ProposalType.Monetary: MONTH_SECONDS,
    ProposalType.Protocol: 2 * MONTH_SECONDS,
    ProposalType.Administrative: 3 * MONTH_SECONDS,
    ProposalType.VortexCore: 6 * MONTH_SECONDS,
}

MIN_TIER_FOR_TYPE = {
    ProposalType.Product: Tier.Citizen,
    ProposalType.FeeDistribution: Tier.Senator,
    ProposalType.Monetary: Tier.Legate,
    ProposalType.Protocol: Tier.Legate,
    ProposalType.Administrative: Tier.Legate,
    ProposalType.VortexCore: Tier.Consul,
}

TIER_YEARS_REQUIRED = {
    Tier.Citizen: 0,
    Tier.Senator: 1,
    Tier.Legate: 2,
    Tier.Consul: 4,
}

TIERS_REQUIRING_FORMATION = {Tier.Legate, Tier.Consul}


def ceil_share(share: Fraction, count: int) -> int:
    """ceil(share * count) on exact rationals."""
    x = share * count
    return -((-x.numerator) // x.denominator)


def pool_threshold(governor_count: int) -> int:
    return ceil_share(POOL_SHARE, governor_count)


def quorum_threshold(eligible_power: int) -> int:
    return ceil_share(QUORUM_SHARE, eligible_power)


def approval_threshold(cast_power: int) -> int:
    return ceil_share(APPROVAL_SHARE, cast_power)


def decide(eligible_power: int, cast_power: int, yes_power: int) -> tuple[bool, bool]:
    """Pure quorum/approval decision used by tally and by property sweeps."""
    quorum_met = cast_power >= quorum_threshold(eligible_power)
    approved = quorum_met and yes_power >= approval_threshold(cast_power)
    return quorum_met, approved


def min_approving_yes(eligible_power: int) -> int:
    """Smallest yes power that can ever approve: 66% of the smallest quorum."""
    return approval_threshold(quorum_threshold(eligible_power))


@dataclass
class GovernorRecord:
    node_id: str
    role: Role = Role.HumanNode
    tier: Tier = Tier.Citizen
    governing_since: int = 0
    formation_participant: bool = False
    has_approved_proposal: bool = False
    delegations_received: set[str] = field(default_factory=set)
    delegated_to: str | None = None
    active_this_month: bool = False
    runs_node: bool = True


def voting_power(record: GovernorRecord) -> int:
    """1 + live delegations; a Delegator's own unit travels to the delegatee."""
    return 1 + len(record.delegations_received)


def tier_promotion(record: GovernorRecord, now: int) -> Tier:
    """Highest tier whose requirements the record meets right now.

    Every tier needs a running node and an approved proposal; Legate and
    above additionally need Formation participation; years of governing
    gate each step.
    """
    if not (record.runs_node and record.has_approved_proposal):
        return record.tier
    years = (now - record.governing_since) // YEAR_SECONDS
    best = record.tier
    for tier in (Tier.Citizen, Tier.Senator, Tier.Legate, Tier.Consul):
        if years < TIER_YEARS_REQUIRED[tier]:
            continue
        if tier in TIERS_REQUIRING_FORMATION and not record.formation_participant:
            continue
        if tier.value > best.value:
            best = tier
    return best


@dataclass
class Proposal:
    id: str
    proposer: str
    type: ProposalType
    state: ProposalState
    submitted_at: int
    pool_upvotes: set[str] = field(default_factory=set)
    pool_downvotes: set[str] = field(default_factory=set)
    vote_yes: set[str] = field(default_factory=set)
    vote_no: set[str] = field(default_factory=set)
    vote_deadline: int | None = None
    resubmit_eligible_at: int | None = None
    approval_count: int = 0

    @property
    def pseudonym(self) -> str:
        # reports never show the proposer, only this unlinkable handle
        return hashlib.sha256(f"pool:{self.id}".encode()).hexdigest()[:8]

    @property
    def open(self) -> bool:
        return self.state in (ProposalState.InPool, ProposalState.InVote)


@dataclass(frozen=True)
class TallyResult:
    eligible_power: int
    votes_cast: int
    yes: int
    quorum_met: bool
    approved: bool

    def to_record(self, proposal: Proposal) -> dict:
        return {
            "proposal": proposal.pseudonym,
            "type": proposal.type.value,
            "eligible_power": self.eligible_power,
            "votes_cast": self.votes_cast,
            "yes": self.yes,
            "quorum_met": self.quorum_met,
            "approved": self.approved,
        }


@dataclass(frozen=True)
class VetoResult:
    vetoed: bool
    consul_yes: int
    consul_total: int


@dataclass(frozen=True)
class FormationGrant:
    proposal_id: str
    vault_balance: int
    consul_gated: bool


class Vortex:
    """Single-writer governance state: governors, the pool, and live votes."""

    def __init__(self):
        self.governors: dict[str, GovernorRecord] = {}
        self.proposals: dict[str, Proposal] = {}
        self.pending_perpetrations: list[tuple[str, PerpetrationKind]] = []
        self._proposal_seq = 0

    # -- membership -------------------------------------------------------

    def register_human_node(self, node_id: str, now: int = 0) -> GovernorRecord:
        record = GovernorRecord(node_id=node_id, governing_since=now)
        self.governors[node_id] = record
        return record

    def promote_to_governor(self, node_id: str, now: int) -> GovernorRecord:
        record = self.governors[node_id]
        if record.role == Role.HumanNode:
            record.role = Role.Governor
            record.governing_since = now
        return record

    def governor_count(self) -> int:
        return sum(1 for r in self.governors.values() if r.role == Role.Governor)

    def eligible_power(self) -> int:
        return sum(
            voting_power(r) for r in self.governors.values() if r.role == Role.Governor
        )

    # -- delegation -------------------------------------------------------

    def delegate(self, delegator_id: str, delegatee_id: str) -> None:
        src = self.governors[delegator_id]
        dst = self.governors[delegatee_id]
        if src.role not in (Role.Governor, Role.Delegator):
            raise NotGovernor(f"{delegator_id} is not a Governor")
        if dst.role == Role.Delegator:
            raise DelegationDepthExceeded("cannot delegate to a Delegator")
        if dst.role != Role.Governor:
            raise NotGovernor(f"{delegatee_id} is not a Governor")
        if src.delegations_received:
            raise DelegationDepthExceeded(
                "a Governor holding delegations cannot delegate"
            )
        if src.delegated_to is not None:
            self.undelegate(delegator_id)  # re-delegation is instant
        src.role = Role.Delegator
        src.delegated_to = delegatee_id
        dst.delegations_received.add(delegator_id)

    def undelegate(self, delegator_id: str) -> None:
        src = self.governors[delegator_id]
        if src.delegated_to is None:
            return
        self.governors[src.delegated_to].delegations_received.discard(delegator_id)
        src.delegated_to = None
        src.role = Role.Governor

    # -- proposals --------------------------------------------------------

    def _open_count(self, proposer: str) -> int:
        return sum(1 for p in self.proposals.values() if p.proposer == proposer and p.open)

    def submit_proposal(
        self,
        proposer: str,
        ptype: ProposalType,
        now: int,
        nominated_by: str | None = None,
        resubmit_of: str | None = None,
    ) -> Proposal:
        record = self.governors.get(proposer)
        if record is None:
            # non-human actors only get in on a Governor's nomination
            nominator = self.governors.get(nominated_by or "")
            if nominator is None or nominator.role != Role.Governor:
                raise NotNominated(f"{proposer} is not a human node and has no nominator")
            tier = nominator.tier
        else:
            # a plain human node proposes with Citizen-level rights
            tier = record.tier if record.role == Role.Governor else Tier.Citizen
        if tier.value < MIN_TIER_FOR_TYPE[ptype].value:
            self.pending_perpetrations.append(
                (proposer, PerpetrationKind.MismatchedProposalTypeNoRight)
            )
            raise TierInsufficient(f"{tier.name} may not submit {ptype.value}")
        if self._open_count(proposer) >= MAX_OPEN_PROPOSALS:
            raise TooManyOpenProposals(f"{proposer} already has {MAX_OPEN_PROPOSALS} open")

        approval_count = 0
        if resubmit_of is not None:
            prior = self.proposals[resubmit_of]
            if prior.resubmit_eligible_at is not None and now < prior.resubmit_eligible_at:
                raise ResubmitTooSoon(
                    f"{resubmit_of} can be proposed again at {prior.resubmit_eligible_at}"
                )
            approval_count = prior.approval_count

        self._proposal_seq += 1
        proposal = Proposal(
            id=f"hup-{self._proposal_seq}",
            proposer=proposer,
            type=ptype,
            state=ProposalState.InPool,
            submitted_at=now,
            approval_count=approval_count,
        )
        self.proposals[proposal.id] = proposal
        if record is not None:
            record.active_this_month = True
        return proposal

    def pool_boards(self, now: int) -> dict[str, list[str]]:
        """Presentation-only orderings over the one underlying pool.

        fresh: newest first; trending: most pool reactions first (the pool
        does not timestamp individual reactions, so "recent" is the whole
        pool window); popular: most upvotes first. Entries are pseudonyms.
        """
        in_pool = [p for p in self.proposals.values() if p.state is ProposalState.InPool]
        fresh = sorted(in_pool, key=lambda p: (-p.submitted_at, p.id))
        trending = sorted(
            in_pool,
            key=lambda p: (-(len(p.pool_upvotes) + len(p.pool_downvotes)), p.id),
        )
        popular = sorted(in_pool, key=lambda p: (-len(p.pool_upvotes), p.id))
        return {
            "fresh": [p.pseudonym for p in fresh],
            "trending": [p.pseudonym for p in trending],
            "popular": [p.pseudonym for p in popular],
        }

    def expire_stale(self, now: int) -> list[Proposal]:
        """Drop pool proposals that outlived their type's max pool time."""
        expired = []
        for p in self.proposals.values():
            if p.state is ProposalState.InPool and now > p.submitted_at + POOL_MAX_SECONDS[p.type]:
                p.state = ProposalState.Expired
                p.resubmit_eligible_at = now + RESUBMIT_COOLDOWN
                expired.append(p)
        return expired

    def pool_vote(self, governor_id: str, proposal_id: str, upvote: bool, now: int) -> Proposal:
        record = self.governors.get(governor_id)
        if record is None or record.role != Role.Governor:
            raise NotGovernor(f"{governor_id} cannot vote in the pool")
        proposal = self.proposals[proposal_id]
        self.expire_stale(now)
        if proposal.state is not ProposalState.InPool:
            raise ProposalNotActive(f"{proposal_id} is {proposal.state.value}")
        if governor_id in proposal.pool_upvotes | proposal.pool_downvotes:
            raise DuplicatePoolVote(f"{governor_id} already pool-voted on {proposal_id}")
        (proposal.pool_upvotes if upvote else proposal.pool_downvotes).add(governor_id)
        record.active_this_month = True
        voters = len(proposal.pool_upvotes | proposal.pool_downvotes)
        if voters >= pool_threshold(self.governor_count()):
            proposal.state = ProposalState.InVote
            proposal.vote_deadline = now + WEEK_SECONDS
        return proposal

    def cast_vote(self, governor_id: str, proposal_id: str, yes: bool, now: int) -> Proposal:
        record = self.governors.get(governor_id)
        if record is None or record.role != Role.Governor:
            raise NotGovernor(f"{governor_id} cannot vote (delegators vote via their delegatee)")
        proposal = self.proposals[proposal_id]
        if proposal.state is not ProposalState.InVote:
            raise ProposalNotActive(f"{proposal_id} is {proposal.state.value}")
        if now >= proposal.vote_deadline:
            raise ProposalNotActive("voting window closed; call tally")
        if governor_id in proposal.vote_yes | proposal.vote_no:
            raise DuplicateVote(f"{governor_id} already voted on {proposal_id}")
        (proposal.vote_yes if yes else proposal.vote_no).add(governor_id)
        record.active_this_month = True
        return proposal

    def tally(self, proposal_id: str, now: int) -> TallyResult:
        proposal = self.proposals[proposal_id]
        if proposal.state is not ProposalState.InVote:
            raise ProposalNotActive(f"{proposal_id} is {proposal.state.value}")
        if now < proposal.vote_deadline:
            raise VotingStillOpen(f"deadline at {proposal.vote_deadline}")

        def power_of(voters: set[str]) -> int:
            return sum(
                voting_power(self.governors[v])
                for v in voters
                if v in self.governors and self.governors[v].role == Role.Governor
            )

        eligible = self.eligible_power()
        yes = power_of(proposal.vote_yes)
        cast = yes + power_of(proposal.vote_no)
        quorum_met, approved = decide(eligible, cast, yes)
        if approved:
            proposal.state = ProposalState.Approved
            proposal.approval_count += 1
            proposer = self.governors.get(proposal.proposer)
            if proposer is not None:
                proposer.has_approved_proposal = True
        else:
            proposal.state = ProposalState.Declined
            proposal.resubmit_eligible_at = now + RESUBMIT_COOLDOWN
        return TallyResult(
            eligible_power=eligible,
            votes_cast=cast,
            yes=yes,
            quorum_met=quorum_met,
            approved=approved,
        )

    def veto(self, proposal_id: str, consul_yes: int, consul_total: int) -> VetoResult:
        proposal = self.proposals[proposal_id]
        if proposal.state is not ProposalState.Approved:
            raise NotApproved(f"{proposal_id} is {proposal.state.value}")
        if proposal.approval_count >= 3:
            raise VetoExhausted("approved three times; the decision stands")
        vetoed = consul_total > 0 and consul_yes >= ceil_share(VETO_SHARE, consul_total)
        if vetoed:
            proposal.state = ProposalState.Declined
        return VetoResult(vetoed=vetoed, consul_yes=consul_yes, consul_total=consul_total)

    def route_to_formation(
        self,
        proposal_id: str,
        consul_yes: int,
        consul_total: int,
        network_age_seconds: int,
        vault_balance: int,
    ) -> FormationGrant:
        """Hand an approved proposal to the grant vault.

        During the network's first four years the grant additionally needs
        66% of Consuls behind it.
        """
        proposal = self.proposals[proposal_id]
        if proposal.state is not ProposalState.Approved:
            raise NotApproved(f"{proposal_id} is {proposal.state.value}")
        gated = network_age_seconds < FORMATION_CONSUL_GATE_SECONDS
        if gated:
            needed = ceil_share(VETO_SHARE, consul_total) if consul_total else 1
            if consul_yes < needed:
                raise ConsulApprovalMissing(
                    f"{consul_yes}/{consul_total} consuls; need {needed}"
                )
        return FormationGrant(
            proposal_id=proposal_id, vault_balance=vault_balance, consul_gated=gated
        )

    # -- maintenance ------------------------------------------------------

    def monthly_activity_sweep(self, now: int) -> list[str]:
        """Demote Governors who neither proposed nor voted this month.

        Delegators are exempt (their voice is exercised by the delegatee).
        A demoted Governor's received delegations dissolve so no voting
        power dangles from a non-governing record.
        """
        to_demote = [
            r
            for r in self.governors.values()
            if r.role is Role.Governor and not r.active_this_month
        ]
        demoted = []
        for record in to_demote:
            for delegator_id in sorted(record.delegations_received):
                self.undelegate(delegator_id)
            record.role = Role.HumanNode
            demoted.append(record.node_id)
        for record in self.governors.values():
            if record.role is Role.Governor:
                record.active_this_month = False
        return demoted
