"""Exhaustive search for SDSs with a prescribed symmetry type."""

import itertools
import logging
import time
from dataclasses import dataclass, field
from math import comb
from multiprocessing import Pool
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from errors import InvalidParametersError, SearchBudgetExceeded
from groups import Group, make_group
from models import BlockConstraint, DedupMode, SdsParams, SearchSpec, SymmetryType
from sds import Block, SdsFamily, difference_counts, type_compatible
from storage import FamilyStore

logger = logging.getLogger(__name__)

Slot = Tuple[str, int]


def _negation_pairs(g: Group) -> List[Tuple[int, int]]:
    return [(x, g.neg(x)) for x in range(1, g.order) if x < g.neg(x)]


def enumerate_blocks(g: Group, size: int, constraint: BlockConstraint) -> Iterator[Block]:
    """Yield every block of the given size satisfying the constraint, once each."""
    n = g.order
    if size < 0 or size > n:
        return

    if constraint == BlockConstraint.FREE:
        for combo in itertools.combinations(range(n), size):
            yield Block(g, frozenset(combo))

    elif constraint == BlockConstraint.SKEW:
        if n % 2 == 0 or size != (n - 1) // 2:
            return
        pairs = _negation_pairs(g)
        for choice in itertools.product((0, 1), repeat=len(pairs)):
            yield Block(g, frozenset(pair[c] for pair, c in zip(pairs, choice)))

    else:
        fixed = [x for x in range(n) if g.neg(x) == x]
        pairs = _negation_pairs(g)
        for j in range(len(pairs) + 1):
            r = size - 2 * j
            if not 0 <= r <= len(fixed):
                continue
            for singles in itertools.combinations(fixed, r):
                for chosen in itertools.combinations(pairs, j):
                    yield Block(g, frozenset(singles).union(*chosen))


def candidate_count(g: Group, size: int, constraint: BlockConstraint) -> int:
    n = g.order
    if constraint == BlockConstraint.FREE:
        return comb(n, size) if 0 <= size <= n else 0
    pairs = len(_negation_pairs(g))
    if constraint == BlockConstraint.SKEW:
        return 2 ** pairs if n % 2 == 1 and size == (n - 1) // 2 else 0
    fixed = n - 2 * pairs
    return sum(comb(fixed, size - 2 * j) * comb(pairs, j) for j in range(pairs + 1) if 0 <= size - 2 * j <= fixed)


def assign_positions(params: SdsParams, symmetry_type: SymmetryType) -> List[Tuple[Slot, ...]]:
    """Every distinct way to give the block sizes to the typed positions.

    Skew positions take size (n-1)/2; within one letter sizes are listed in
    descending order, so each assignment is a distinct multiset of (letter, size).
    """
    letters = symmetry_type.letters
    if len(letters) != len(params.k):
        return []
    half = (params.n - 1) // 2 if params.n % 2 else None

    assignments = set()
    for perm in set(itertools.permutations(params.k)):
        if any(letter == "k" and size != half for letter, size in zip(letters, perm)):
            continue
        sizes = list(perm)
        for letter in set(letters):
            positions = [i for i, l in enumerate(letters) if l == letter]
            for i, size in zip(positions, sorted((perm[i] for i in positions), reverse=True)):
                sizes[i] = size
        assignments.add(tuple(zip(letters, sizes)))
    return sorted(assignments, key=lambda slots: [-size for _, size in slots])


@dataclass
class _Plan:
    slots: Tuple[Slot, ...]
    candidates: List[List[Block]]
    counts: List[np.ndarray]
    twin: List[Optional[int]]


def _twin_slots(slots: Sequence[Slot]) -> List[Optional[int]]:
    """For each slot, the latest earlier slot with the same (letter, size)."""
    twins = []
    for j, slot in enumerate(slots):
        earlier = [i for i in range(j) if slots[i] == slot]
        twins.append(earlier[-1] if earlier else None)
    return twins


def _build_plans(spec: SearchSpec) -> List[_Plan]:
    group = make_group(spec.group)
    budget = spec.budget or settings.search_budget
    plans = []
    for slots in assign_positions(spec.params, spec.symmetry_type):
        total = sum(candidate_count(group, size, BlockConstraint.from_letter(letter)) for letter, size in slots)
        if total > budget:
            raise SearchBudgetExceeded(f"{total} candidate blocks exceed the budget of {budget}", [], 0.0, 0)
        candidates, counts = [], []
        for letter, size in slots:
            blocks = list(enumerate_blocks(group, size, BlockConstraint.from_letter(letter)))
            candidates.append(blocks)
            if blocks:
                counts.append(np.vstack([difference_counts([b]) for b in blocks]))
            else:
                counts.append(np.zeros((0, group.order), dtype=np.int64))
        plans.append(_Plan(slots=slots, candidates=candidates, counts=counts, twin=_twin_slots(slots)))
    return plans


class _Exhausted(Exception):
    pass


@dataclass
class _TaskState:
    budget: int
    nodes: int = 0
    hits: List[Tuple[int, ...]] = field(default_factory=list)


def _extend(plan: _Plan, lam: int, depth: int, running: np.ndarray, chosen: List[int], state: _TaskState):
    twin = plan.twin[depth]
    lo = chosen[twin] if twin is not None else 0
    counts = plan.counts[depth][lo:]
    state.nodes += len(counts)
    if state.nodes > state.budget:
        raise _Exhausted()
    if not len(counts):
        return

    totals = running[None, :] + counts
    alive = np.flatnonzero((totals[:, 1:] <= lam).all(axis=1))
    if depth == len(plan.slots) - 1:
        for i in alive[(totals[alive, 1:] == lam).all(axis=1)]:
            state.hits.append(tuple(chosen + [lo + int(i)]))
        return
    for i in alive:
        _extend(plan, lam, depth + 1, totals[i], chosen + [lo + int(i)], state)


def _run_task(plans: List[_Plan], lam: int, task: Tuple[int, int], budget: int) -> Tuple[List[Tuple[int, ...]], int, bool]:
    """Search all families whose first block is candidate `first` of plan `plan_index`."""
    plan_index, first = task
    plan = plans[plan_index]
    state = _TaskState(budget=budget, nodes=1)
    running = plan.counts[0][first]
    try:
        if (running[1:] <= lam).all():
            if len(plan.slots) == 1:
                if (running[1:] == lam).all():
                    state.hits.append((first,))
            else:
                _extend(plan, lam, 1, running, [first], state)
    except _Exhausted:
        return state.hits, state.nodes, True
    return state.hits, state.nodes, False


_WORKER_PLANS: List[_Plan] = []


def _init_worker(spec_json: str):
    global _WORKER_PLANS
    _WORKER_PLANS = _build_plans(SearchSpec.model_validate_json(spec_json))


def _worker_task(args: Tuple[int, Tuple[int, int], int]):
    lam, task, budget = args
    return _run_task(_WORKER_PLANS, lam, task, budget)


@dataclass
class SearchOutcome:
    """Families found by a search with its statistics."""
    spec: SearchSpec
    families: List[SdsFamily]
    raw_count: int
    nodes: int
    elapsed: float
    compatible: bool = True
    assignments: List[Tuple[Slot, ...]] = field(default_factory=list)
    store: Optional[FamilyStore] = None


def _check_spec(spec: SearchSpec) -> Group:
    group = make_group(spec.group)
    if spec.params.n != group.order:
        raise InvalidParametersError(f"parameters are for n={spec.params.n}, group {spec.group} has order {group.order}")
    if not spec.params.eq1_holds:
        raise InvalidParametersError(f"{spec.params} violates lambda = sum(k) - n")
    return group


def _new_store(spec: SearchSpec) -> FamilyStore:
    if spec.dedup == DedupMode.CANONICAL:
        return FamilyStore.canonical(spec.allow_translation, spec.limit)
    return FamilyStore.raw(spec.limit)


def _family(group: Group, plan: _Plan, indices: Sequence[int], spec: SearchSpec) -> SdsFamily:
    blocks = tuple(plan.candidates[j][i] for j, i in enumerate(indices))
    return SdsFamily(group, blocks, spec.symmetry_type)


def search_with_stats(spec: SearchSpec) -> SearchOutcome:
    """Pruned depth-first search; output is independent of the worker count."""
    start = time.time()
    group = _check_spec(spec)
    if not type_compatible(spec.params, spec.symmetry_type):
        logger.info(f"{spec.params} is incompatible with type {spec.symmetry_type}")
        return SearchOutcome(spec, [], 0, 0, time.time() - start, compatible=False)

    budget = spec.budget or settings.search_budget
    plans = _build_plans(spec)
    tasks = [(p, i) for p, plan in enumerate(plans) for i in range(len(plan.candidates[0]))]
    lam = spec.params.lam
    logger.info(f"Searching {spec.group} {spec.params} type {spec.symmetry_type}: "
                f"{len(plans)} size assignments, {len(tasks)} first-block tasks, {spec.workers} workers")

    store = _new_store(spec)
    raw_count = 0
    nodes = 0
    completed = 0

    def consume(results) -> None:
        nonlocal raw_count, nodes, completed
        for (plan_index, _), (hits, task_nodes, exhausted) in zip(tasks, results):
            nodes += task_nodes
            raw_count += len(hits)
            for indices in hits:
                store.add(_family(group, plans[plan_index], indices, spec))
            if exhausted or nodes > budget:
                raise SearchBudgetExceeded(
                    f"search budget of {budget} nodes exhausted after {completed}/{len(tasks)} tasks",
                    store.families(), completed / len(tasks), nodes,
                )
            completed += 1
            if store.full:
                logger.info(f"Reached limit of {spec.limit} families")
                return

    if spec.workers > 1 and len(tasks) > 1:
        with Pool(spec.workers, initializer=_init_worker, initargs=(spec.model_dump_json(),)) as pool:
            consume(pool.imap(_worker_task, [(lam, task, budget) for task in tasks]))
    else:
        consume(_run_task(plans, lam, task, budget) for task in tasks)

    families = store.families()
    elapsed = time.time() - start
    logger.info(f"Search finished: {raw_count} raw families, {len(families)} kept, {nodes} nodes in {elapsed:.2f}s")
    return SearchOutcome(spec, families, raw_count, nodes, elapsed, assignments=[p.slots for p in plans], store=store)


def search(spec: SearchSpec) -> List[SdsFamily]:
    return search_with_stats(spec).families


def naive_search(spec: SearchSpec) -> List[SdsFamily]:
    """Unpruned product over all candidates; interchangeable slots are sorted afterwards."""
    group = _check_spec(spec)
    if not type_compatible(spec.params, spec.symmetry_type):
        return []
    lam = spec.params.lam
    store = _new_store(spec)
    for plan in _build_plans(spec):
        groups = {}
        for j, slot in enumerate(plan.slots):
            groups.setdefault(slot, []).append(j)
        for indices in itertools.product(*(range(len(c)) for c in plan.candidates)):
            total = sum(plan.counts[j][i] for j, i in enumerate(indices))
            if not (total[1:] == lam).all():
                continue
            normalized = list(indices)
            for positions in groups.values():
                for j, i in zip(positions, sorted(indices[j] for j in positions)):
                    normalized[j] = i
            store.add(_family(group, plan, normalized, spec))
    return store.families()
