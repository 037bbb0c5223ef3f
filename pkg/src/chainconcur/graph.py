"""Per-block transaction dependency graphs and their conflict groups.

In a UTXO block the nodes are transactions and an edge runs from the
transaction that creates an output to the one that spends it within the same
block. In an account block the nodes are addresses and each trace contributes
a sender-to-receiver edge; transactions are then grouped by the address
component their endpoints fall into. Either way, the connected components are
the sets of transactions that cannot safely run concurrently.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .ingest import BlockRecords, Model


class CycleError(ValueError):
    """Intra-block spend edges form a cycle, which only corrupt input can do."""


@dataclass(frozen=True, slots=True)
class TxComponent:
    """One conflict group.

    ``tx_ids`` holds transaction hashes for UTXO blocks and integer
    transaction indices for account blocks. ``gas_total`` is the summed
    per-transaction gas of the members (account blocks only, 0 otherwise).
    """

    tx_ids: frozenset
    tx_count: int
    gas_total: int = 0


@dataclass(frozen=True, slots=True)
class BlockGraph:
    """Dependency graph of one block plus its component decomposition.

    ``intra_block_edges`` keeps one entry per input row (UTXO: ``(creator,
    spender)`` hash pairs, duplicates retained) or per trace (account:
    ``(from_addr, to_addr, tx_index)`` triples), so row-level counts stay
    recoverable from the graph alone.
    """

    block_number: int
    model: Model
    tx_count: int
    components: tuple[TxComponent, ...]
    intra_block_edges: tuple


def connected_components(nodes: Iterable[Hashable],
                         edges: Iterable[tuple]) -> list[TxComponent]:
    """Partition ``nodes`` into connected components by breadth-first search.

    Edges are treated as undirected. Components are ordered by their smallest
    member (lexicographic for strings, numeric for integers), so the result
    is independent of node and edge order.
    """
    adjacency: dict = {node: [] for node in nodes}
    for a, b in edges:
        if a not in adjacency or b not in adjacency:
            raise ValueError(f"edge ({a!r}, {b!r}) references an unknown node")
        adjacency[a].append(b)
        adjacency[b].append(a)
    seen: set = set()
    parts: list[list] = []
    for start in adjacency:
        if start in seen:
            continue
        seen.add(start)
        members = [start]
        queue = deque((start,))
        while queue:
            node = queue.popleft()
            for neighbor in adjacency[node]:
                if neighbor not in seen:
                    seen.add(neighbor)
                    members.append(neighbor)
                    queue.append(neighbor)
        parts.append(members)
    parts.sort(key=min)
    return [TxComponent(tx_ids=frozenset(m), tx_count=len(m)) for m in parts]


def _utxo_nodes(block: BlockRecords) -> set[str]:
    """Non-coinbase transactions: those with at least one real input."""
    inputs_by_tx: dict[str, bool] = {}
    for record in block.records:
        has_source = inputs_by_tx.get(record.tx_hash, False)
        inputs_by_tx[record.tx_hash] = has_source or record.spent_tx_hash is not None
    return {tx for tx, has_source in inputs_by_tx.items() if has_source}


def build_utxo_graph(block: BlockRecords) -> BlockGraph:
    """Create-spend dependency graph over the block's transactions.

    Coinbase transactions (all inputs without a source) are dropped from the
    node set, so a spend of an in-block coinbase output counts as external.
    """
    if block.model is not Model.UTXO:
        raise ValueError(f"expected a UTXO block, got {block.model}")
    nodes = _utxo_nodes(block)
    edges = [(record.spent_tx_hash, record.tx_hash)
             for record in block.records if record.spent_tx_hash in nodes]
    components = connected_components(nodes, edges)
    return BlockGraph(block.block_number, Model.UTXO, len(nodes),
                      tuple(components), tuple(edges))


def build_account_graph(block: BlockRecords) -> BlockGraph:
    """Address-level dependency graph, with transactions mapped to components.

    Every trace adds a sender-to-receiver edge (contract creations add only
    the sender node). Addresses referenced by the same transaction are also
    linked to each other, so each transaction always lands in exactly one
    component; per-component gas sums each member transaction's gas once.
    """
    if block.model is not Model.ACCOUNT:
        raise ValueError(f"expected an account block, got {block.model}")
    addr_nodes: set[str] = set()
    trace_edges: list[tuple[str, str, int]] = []
    tx_addrs: dict[int, list[str]] = {}
    tx_gas: dict[int, int] = {}
    for record in block.records:
        tx_gas.setdefault(record.tx_index, record.gas_used)
        addrs = tx_addrs.setdefault(record.tx_index, [])
        addr_nodes.add(record.from_addr)
        addrs.append(record.from_addr)
        if record.to_addr is not None:
            addr_nodes.add(record.to_addr)
            addrs.append(record.to_addr)
            trace_edges.append((record.from_addr, record.to_addr, record.tx_index))

    link_edges = [(a, b) for a, b, _ in trace_edges]
    for addrs in tx_addrs.values():
        link_edges.extend(zip(addrs, addrs[1:]))
    addr_components = connected_components(addr_nodes, link_edges)

    component_of: dict[str, int] = {}
    for index, component in enumerate(addr_components):
        for addr in component.tx_ids:
            component_of[addr] = index
    groups: dict[int, list[int]] = {}
    for tx_index, addrs in tx_addrs.items():
        groups.setdefault(component_of[addrs[0]], []).append(tx_index)

    components = [TxComponent(tx_ids=frozenset(txs), tx_count=len(txs),
                              gas_total=sum(tx_gas[i] for i in txs))
                  for txs in groups.values()]
    components.sort(key=lambda c: min(c.tx_ids))
    return BlockGraph(block.block_number, Model.ACCOUNT, len(tx_addrs),
                      tuple(components), tuple(trace_edges))


def max_depth(graph: BlockGraph) -> int:
    """Length in edges of the longest intra-block spend chain.

    0 when the block has no intra-block spends. Raises CycleError instead of
    looping if the edges are not acyclic.
    """
    if graph.model is not Model.UTXO:
        raise ValueError("max_depth is defined for UTXO graphs only")
    nodes: set[str] = set()
    for component in graph.components:
        nodes.update(component.tx_ids)
    successors: dict[str, set[str]] = {node: set() for node in nodes}
    for a, b in graph.intra_block_edges:
        successors[a].add(b)
    indegree = {node: 0 for node in nodes}
    for succs in successors.values():
        for b in succs:
            indegree[b] += 1
    queue = deque(node for node in nodes if indegree[node] == 0)
    depth = {node: 0 for node in nodes}
    processed = 0
    longest = 0
    while queue:
        a = queue.popleft()
        processed += 1
        for b in successors[a]:
            if depth[a] + 1 > depth[b]:
                depth[b] = depth[a] + 1
                longest = max(longest, depth[b])
            indegree[b] -= 1
            if indegree[b] == 0:
                queue.append(b)
    if processed != len(nodes):
        raise CycleError(f"block {graph.block_number}: cycle in intra-block spends")
    return longest


def count_inblock_spent_txos(block: BlockRecords) -> int:
    """Number of input rows that spend an output created in the same block."""
    if block.model is not Model.UTXO:
        raise ValueError(f"expected a UTXO block, got {block.model}")
    nodes = _utxo_nodes(block)
    return sum(1 for record in block.records if record.spent_tx_hash in nodes)
