"""Dependency tracking: per-datum access history and the growing task DAG.

The engine is a plain sequential state machine. Callers that share a
graph between threads (the runtime does) must serialise every mutation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DuplicateInstanceId, InvalidTransition
from .model import AccessMode, DatumId, ReductionMode, TaskInstance, TaskState

IN = AccessMode.IN
OUT = AccessMode.OUT
INOUT = AccessMode.INOUT
REDUCTION = AccessMode.REDUCTION

# round-robin fill colours for DOT export, indexed by definition rank
PALETTE = (
    "skyblue",
    "tomato",
    "palegreen",
    "gold",
    "orchid",
    "lightgray",
    "sandybrown",
    "turquoise",
)


@dataclass
class DatumAccessState:
    """Access history of one datum since its last write.

    ``writers`` are the tasks the next reader must wait for (a single
    task except right after a commutative reduction epoch), ``readers``
    the tasks that read since then and ``reductions`` the members of
    the currently open commutative reduction epoch.
    """

    writers: set[int] = field(default_factory=set)
    readers: set[int] = field(default_factory=set)
    reductions: set[int] = field(default_factory=set)


def predecessors_for_access(
    state: DatumAccessState,
    mode: AccessMode,
    reduction_mode: ReductionMode = ReductionMode.CHAIN,
) -> set[int]:
    """Instances a new access in ``mode`` must wait for.

    IN waits on the last writer (RAW). OUT and INOUT wait on the last
    writer and on every reader since (WAW and WAR). A chained reduction
    behaves like INOUT; a commutative one waits only on what preceded
    its epoch. Any non-reduction access also waits on an open epoch.
    """
    if mode is AccessMode.PARAMETER:
        raise ValueError("parameter arguments take no part in dependency analysis")
    if mode is REDUCTION:
        # in CHAIN mode reductions is always empty
        return state.writers | state.readers
    if mode is IN:
        return state.writers | state.reductions
    return state.writers | state.readers | state.reductions


def _apply_access(state: DatumAccessState, mode: AccessMode, task_id: int, reduction_mode: ReductionMode) -> None:
    if mode is REDUCTION and reduction_mode is ReductionMode.COMMUTATIVE:
        state.reductions.add(task_id)
        return
    if state.reductions:
        # a non-reduction access closes the epoch
        state.writers = state.reductions
        state.readers = set()
        state.reductions = set()
    if mode is IN:
        state.readers.add(task_id)
    else:
        state.writers = {task_id}
        state.readers = set()


def _merge_modes(modes: set[AccessMode]) -> AccessMode:
    # one datum passed more than once to the same task
    if len(modes) == 1:
        return next(iter(modes))
    return INOUT


class DependencyGraph:
    """Task instances plus the RAW/WAR/WAW edges between them.

    Edges always point from a lower to a higher instance id, so the
    graph is acyclic by construction. Finished nodes are kept for export
    and post-run verification.
    """

    def __init__(self, reduction_mode: ReductionMode | str = ReductionMode.CHAIN):
        self.reduction_mode = ReductionMode(reduction_mode)
        self.nodes: dict[int, TaskInstance] = {}
        self.edges: set[tuple[int, int]] = set()
        self.successors: dict[int, list[int]] = {}
        self.predecessors: dict[int, tuple[int, ...]] = {}
        self.data: dict[DatumId, DatumAccessState] = {}
        self.executed_count = 0
        self._last_id = 0

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, instance_id):
        return instance_id in self.nodes

    def predecessors_for(self, state: DatumAccessState, mode: AccessMode) -> set[int]:
        return predecessors_for_access(state, mode, self.reduction_mode)

    def register_instance(self, instance: TaskInstance) -> set[int]:
        """Add ``instance`` and return the set of its predecessors.

        The instance ends up READY, WAITING, or CANCELLED when one of its
        predecessors already failed or was cancelled.
        """
        tid = instance.instance_id
        if tid in self.nodes:
            raise DuplicateInstanceId(f"instance {tid} is already registered")
        if tid <= self._last_id:
            raise DuplicateInstanceId(f"instance id {tid} is not above the last id {self._last_id}")

        per_datum: dict[DatumId, set[AccessMode]] = {}
        for key, mode in instance.accesses:
            if mode.is_dependency:
                per_datum.setdefault(key, set()).add(mode)

        preds: set[int] = set()
        for key, modes in per_datum.items():
            state = self.data.get(key)
            if state is None:
                state = self.data[key] = DatumAccessState()
            mode = _merge_modes(modes)
            preds |= self.predecessors_for(state, mode)
            _apply_access(state, mode, tid, self.reduction_mode)

        for p in preds:
            if p >= tid:
                raise AssertionError(f"edge ({p}, {tid}) would break id ordering")
            self.edges.add((p, tid))
            self.successors[p].append(tid)

        nodes = self.nodes
        self._last_id = tid
        nodes[tid] = instance
        self.successors[tid] = []
        self.predecessors[tid] = tuple(sorted(preds))

        pending = 0
        doomed = False
        for p in preds:
            st = nodes[p].state
            if st is not TaskState.FINISHED:
                pending += 1
                if st is TaskState.FAILED or st is TaskState.CANCELLED:
                    doomed = True
        instance.unfinished_predecessors = pending
        if doomed:
            instance.state = TaskState.CANCELLED
        elif pending:
            instance.state = TaskState.WAITING
        else:
            instance.state = TaskState.READY
        return preds

    def mark_running(self, instance_id: int) -> None:
        node = self.nodes[instance_id]
        if node.state is not TaskState.READY:
            raise InvalidTransition(f"{node.label} is {node.state.value}, not ready")
        node.state = TaskState.RUNNING

    def mark_complete(self, instance_id: int) -> list[int]:
        """Finish a running node; return successors that became ready, in id order."""
        node = self.nodes.get(instance_id)
        if node is None or node.state is not TaskState.RUNNING:
            raise InvalidTransition(f"cannot complete instance {instance_id}: not running")
        node.state = TaskState.FINISHED
        self.executed_count += 1
        ready = []
        nodes = self.nodes
        for s in self.successors[instance_id]:
            succ = nodes[s]
            if succ.state is TaskState.CANCELLED:
                continue
            succ.unfinished_predecessors -= 1
            if succ.unfinished_predecessors == 0:
                succ.state = TaskState.READY
                ready.append(s)
        return ready

    def mark_failed(self, instance_id: int) -> set[int]:
        """Fail a running node and cancel every transitive successor not yet started."""
        node = self.nodes.get(instance_id)
        if node is None or node.state is not TaskState.RUNNING:
            raise InvalidTransition(f"cannot fail instance {instance_id}: not running")
        node.state = TaskState.FAILED
        cancelled = set()
        stack = list(self.successors[instance_id])
        while stack:
            s = stack.pop()
            succ = self.nodes[s]
            if succ.state in (TaskState.CREATED, TaskState.WAITING, TaskState.READY):
                succ.state = TaskState.CANCELLED
                cancelled.add(s)
                stack.extend(self.successors[s])
        return cancelled

    def to_dot(self) -> str:
        return export_dot(self)


def export_dot(graph: DependencyGraph) -> str:
    """Render ``graph`` as a Graphviz digraph.

    Nodes are labelled ``name#id`` and filled by task definition: the
    definitions present are ranked by id and coloured round-robin from
    :data:`PALETTE`, which keeps the output independent of how many
    definitions exist elsewhere in the process.
    """
    ids = sorted(graph.nodes)
    def_ids = sorted({graph.nodes[i].definition.definition_id for i in ids})
    colour = {d: PALETTE[rank % len(PALETTE)] for rank, d in enumerate(def_ids)}

    lines = ["digraph tasks {", "  node [style=filled, shape=ellipse];"]
    for i in ids:
        node = graph.nodes[i]
        defn = node.definition
        label = node.label.replace('"', '\\"')
        lines.append(
            f'  {i} [label="{label}", fillcolor="{colour[defn.definition_id]}", '
            f'tooltip="priority {defn.priority}"];'
        )
    for u, v in sorted(graph.edges):
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
