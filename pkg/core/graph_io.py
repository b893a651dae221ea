"""
图与文档的读写

两种格式：
- 边表文本：首行 "n=<int> k=<int>"，之后每行一个元组（空格分隔、字典序、
  "\\n" 换行），读取时忽略空行；
- 带版本的 JSON 文档（mnd-instance / tree-instance / graph-instance），
  读取时用 config/schemas/ 下的 JSON Schema 校验。

字节级格式说明见 docs/FORMATS.md。
"""

import json
import logging
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import jsonschema

from core.constructions import GrowthRecord, LabeledTree, MndInstance
from core.errors import InvalidInputError
from core.models import BlockParams, BlockRecord
from core.shift_graph import GraphLike, KTupleSet, OrderedGraph, as_ktuple_set

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
SCHEMA_DIR = Path(__file__).parent.parent / "config" / "schemas"
EDGE_LIST_SUFFIX = ".edges"
DOCUMENT_KINDS = ("mnd-instance", "tree-instance", "graph-instance")

Loaded = Union[MndInstance, LabeledTree, KTupleSet]


def format_edge_list(graph: GraphLike) -> str:
    """边表文本；元组按字典序输出"""
    tuples = as_ktuple_set(graph)
    lines = [f"n={tuples.n} k={tuples.k}"]
    lines.extend(" ".join(str(x) for x in member.entries) for member in tuples)
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> KTupleSet:
    """解析边表文本

    Raises:
        InvalidInputError: 缺少头部、元组长度不符、非递增或越界（附行号）
    """
    lines = [(number, line.strip()) for number, line in enumerate(text.splitlines(), start=1)]
    lines = [(number, line) for number, line in lines if line]
    if not lines:
        raise InvalidInputError("edge list is empty; expected a 'n=<int> k=<int>' header")

    header_number, header = lines[0]
    try:
        fields = dict(part.split("=", 1) for part in header.split())
        n, k = int(fields["n"]), int(fields["k"])
    except (KeyError, ValueError) as exc:
        raise InvalidInputError(f"line {header_number}: malformed header {header!r}") from exc

    tuples = []
    for number, line in lines[1:]:
        try:
            entries = tuple(int(token) for token in line.split())
        except ValueError as exc:
            raise InvalidInputError(f"line {number}: non-integer entry in {line!r}") from exc
        if len(entries) != k:
            raise InvalidInputError(f"line {number}: expected {k} entries, got {len(entries)}")
        tuples.append(entries)
    try:
        return KTupleSet.from_tuples(n, k, tuples)
    except InvalidInputError as exc:
        raise InvalidInputError(f"edge list rejected: {exc}") from exc


def write_edge_list(graph: GraphLike, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_edge_list(graph))
    logger.debug(f"wrote {len(as_ktuple_set(graph))} tuples to {path}")
    return path


def read_edge_list(path: Union[str, Path]) -> KTupleSet:
    with open(path, "r", encoding="utf-8") as f:
        return parse_edge_list(f.read())


def _metadata() -> Dict[str, Any]:
    return {"generator": "shiftlab", "generated_at": datetime.now().isoformat()}


def instance_to_document(instance: MndInstance) -> Dict[str, Any]:
    """M(n,d) 实例 → 带版本的 JSON 文档"""
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "mnd-instance",
        "params": instance.params.model_dump(mode="json"),
        "resample_limit": instance.resample_limit,
        "edge_count": len(instance.graph),
        "expected_edge_count": instance.expected_edge_count,
        "certified": instance.certified,
        "epsilon_hat": str(instance.epsilon_hat),
        "measured_epsilons": [str(e) for e in instance.measured_epsilons],
        "blocks": [record.model_dump(mode="json") for record in instance.blocks],
        "edges": [list(e) for e in instance.graph.sorted_edges()],
        "metadata": _metadata(),
    }


def tree_to_document(tree: LabeledTree) -> Dict[str, Any]:
    """截断树 → 带版本的 JSON 文档"""
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "tree-instance",
        "params": {"levels": tree.depth, "root_children": tree.root_children, "slack": tree.slack},
        "vertex_count": tree.size,
        "level_sizes": [len(level) for level in tree.levels],
        "levels": tree.levels,
        "children": [[v, first, last] for v, (first, last) in sorted(tree.children.items())],
        "growth_log": [
            {"vertex": g.vertex, "level": g.level, "position": g.position, "required": g.required, "actual": g.actual}
            for g in tree.growth_log
        ],
        "edges": [list(e) for e in tree.edges()],
        "metadata": _metadata(),
    }


def graph_to_document(graph: GraphLike, family: str, params: Dict[str, Any]) -> Dict[str, Any]:
    """普通图 / k 元组集合 → 带版本的 JSON 文档"""
    tuples = as_ktuple_set(graph)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "graph-instance",
        "family": family,
        "n": tuples.n,
        "k": tuples.k,
        "params": params,
        "edge_count": len(tuples),
        "edges": [list(m.entries) for m in tuples],
        "metadata": _metadata(),
    }


def _schema_for(kind: str) -> Dict[str, Any]:
    with open(SCHEMA_DIR / f"{kind}.schema.json", "r", encoding="utf-8") as f:
        return json.load(f)


def validate_document(document: Dict[str, Any]) -> str:
    """按 kind 选择 schema 校验文档，返回 kind

    Raises:
        InvalidInputError: kind 未知或版本不符
        jsonschema.ValidationError: 文档不符合 schema
    """
    kind = document.get("kind") if isinstance(document, dict) else None
    if kind not in DOCUMENT_KINDS:
        raise InvalidInputError(f"unknown document kind {kind!r}")
    if document.get("schema_version") != SCHEMA_VERSION:
        raise InvalidInputError(f"unsupported schema_version {document.get('schema_version')!r}")
    jsonschema.validate(instance=document, schema=_schema_for(kind))
    return kind


def instance_from_document(document: Dict[str, Any]) -> MndInstance:
    """不做边数校验，被改动的实例也能载入后再由 verify 检出"""
    params = BlockParams.model_validate(document["params"])
    graph = OrderedGraph.from_edges(params.n, (tuple(e) for e in document["edges"]))
    blocks = [BlockRecord.model_validate(b) for b in document["blocks"]]
    return MndInstance(
        params=params,
        graph=graph,
        blocks=blocks,
        measured_epsilons=[Fraction(e) for e in document["measured_epsilons"]],
        resample_limit=document["resample_limit"],
    )


def tree_from_document(document: Dict[str, Any]) -> LabeledTree:
    params = document["params"]
    return LabeledTree(
        levels=[list(level) for level in document["levels"]],
        children={v: (first, last) for v, first, last in document["children"]},
        growth_log=[GrowthRecord(**g) for g in document["growth_log"]],
        root_children=params["root_children"],
        slack=params["slack"],
    )


def graph_from_document(document: Dict[str, Any]) -> KTupleSet:
    return KTupleSet.from_tuples(document["n"], document["k"], document["edges"])


def save_document(document: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(document, f, indent=2, ensure_ascii=False)
        f.write("\n")
    logger.info(f"saved {document.get('kind', 'document')} to {path}")
    return path


def load_document(path: Union[str, Path]) -> Tuple[str, Loaded]:
    """读取并校验 JSON 文档，返回 (kind, 对象)"""
    with open(path, "r", encoding="utf-8") as f:
        document = json.load(f)
    kind = validate_document(document)
    if kind == "mnd-instance":
        return kind, instance_from_document(document)
    if kind == "tree-instance":
        return kind, tree_from_document(document)
    return kind, graph_from_document(document)


def resolve_input(path: Union[str, Path]) -> Path:
    """允许省略扩展名：依次尝试原路径、.json、.edges

    Raises:
        FileNotFoundError: 均不存在
    """
    path = Path(path)
    for candidate in (path, path.with_name(path.name + ".json"), path.with_name(path.name + EDGE_LIST_SUFFIX)):
        if candidate.is_file():
            return candidate
    raise FileNotFoundError(f"no such instance: {path} (tried .json and {EDGE_LIST_SUFFIX})")


def load_any(path: Union[str, Path]) -> Tuple[str, Loaded]:
    """JSON 文档或边表文本，按扩展名区分"""
    resolved = resolve_input(path)
    if resolved.suffix == ".json":
        return load_document(resolved)
    return "edge-list", read_edge_list(resolved)
