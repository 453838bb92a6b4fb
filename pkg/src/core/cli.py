"""
Command-line interface for efgrid
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TextIO

from src.config.settings import (
    CARRIER_KINDS,
    DEFAULT_INDEX_PATH,
    DEFAULT_OUTPUT_FORMAT,
    DEFAULT_TOP_K,
    EXIT_DATA,
    EXIT_OK,
    EXIT_USAGE,
    INDEX_ENV_VAR,
    LOG_FORMAT,
    LOG_LEVEL,
    OUTPUT_FORMATS,
    TSV_COLUMNS,
)
from src.core import metrics
from src.core.index_store import load, save, write_snapshot
from src.core.ingestion import ingest
from src.core.mapping import KvMode
from src.core.views import STORED_FORM, FeatureScope, QueryView
from src.models.errors import (
    EfgridError,
    StoreNotFrozenError,
    UnknownEntityError,
    UnknownSourceError,
    UsageError,
)
from src.models.identifiers import EntityId
from src.models.store import AssociationStore, SourceKind
from src.utils.formatters import format_parse_errors, format_rows, format_single
from src.utils.fuzzy_matcher import format_suggestion

logger = logging.getLogger(__name__)


@dataclass
class CliConfig:
    """Settings shared by every subcommand"""
    index_path: Path
    output_format: str = DEFAULT_OUTPUT_FORMAT
    top_k: int = DEFAULT_TOP_K
    normalized: bool = True
    view: QueryView = STORED_FORM

    def __post_init__(self):
        if self.top_k < 1:
            raise UsageError(f"top-k must be >= 1, got {self.top_k}")
        if self.output_format not in OUTPUT_FORMATS:
            raise UsageError(f"unknown output format '{self.output_format}'")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as exceptions instead of exiting with 2"""

    def error(self, message: str):
        raise UsageError(message)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} is not >= 1")
    return value


def _add_view_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--feature-scope", choices=[scope.value for scope in FeatureScope],
                        default=FeatureScope.GLOBAL.value,
                        help="global: features unify across sources; source: split them per source")
    parser.add_argument("--latest-only", action="store_true",
                        help="count each wide-column cell once instead of once per version")


def _epilog() -> str:
    lines = ["TSV output columns (numbers fixed at 10 decimal places):"]
    lines += [f"  {command:<16} {columns}" for command, columns in TSV_COLUMNS.items()]
    lines.append(f"The index path defaults to ${INDEX_ENV_VAR}, then '{DEFAULT_INDEX_PATH}'.")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with every subcommand."""
    parser = _Parser(
        prog="efgrid",
        description="Cross-source entity-feature index: importance, vectors and distances.",
        epilog=_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--index", help="index file (working or frozen snapshot)")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, default=DEFAULT_OUTPUT_FORMAT,
                        help="output format (default: tsv)")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = commands.add_parser("ingest", help="ingest a carrier file into the working index")
    p.add_argument("--kind", required=True, choices=CARRIER_KINDS)
    p.add_argument("--source", required=True, help="source name")
    p.add_argument("--namespace", help="entity namespace (default: the source name)")
    p.add_argument("--latest-only", action="store_true", help="wide: count only the newest version of a cell")
    p.add_argument("--composite-keys", action="store_true", help="kv: keys are 'entity/attribute'")
    p.add_argument("file")

    p = commands.add_parser("alias", help="merge ALIAS into TARGET for associations ingested from now on")
    p.add_argument("alias", help="entity id namespace/local")
    p.add_argument("target", help="entity id namespace/local")

    commands.add_parser("freeze", help="freeze the working index")
    commands.add_parser("stats", help="print |E|, |F| and pair counts")

    p = commands.add_parser("importance", help="rank an entity's features by importance")
    p.add_argument("--entity", required=True)
    p.add_argument("--top", type=_positive_int, default=DEFAULT_TOP_K)
    _add_view_options(p)

    p = commands.add_parser("vector", help="print the normalized entity vector")
    p.add_argument("--entity", required=True)
    _add_view_options(p)

    p = commands.add_parser("neighbors", help="nearest entities")
    p.add_argument("--entity", required=True)
    p.add_argument("--top", type=_positive_int, default=DEFAULT_TOP_K)
    p.add_argument("--raw", action="store_true", help="rank by raw rather than normalized distance")
    _add_view_options(p)

    p = commands.add_parser("distance", help="distance between two entities")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--raw", action="store_true")
    _add_view_options(p)

    p = commands.add_parser("source-distance", help="distance between two sources")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--raw", action="store_true")
    _add_view_options(p)

    p = commands.add_parser("matrix", help="all-pairs entity distances")
    p.add_argument("--raw", action="store_true")
    _add_view_options(p)

    commands.add_parser("export", help="dump the association matrix as TSV")

    p = commands.add_parser("save", help="copy the frozen index to FILE")
    p.add_argument("file")

    p = commands.add_parser("load", help="replace the index with the snapshot in FILE")
    p.add_argument("file")
    return parser


class _Session:
    """One command invocation: configuration plus output streams"""

    def __init__(self, config: CliConfig, args: argparse.Namespace, out: TextIO, err: TextIO):
        self.config = config
        self.args = args
        self.out = out
        self.err = err

    def write_rows(self, columns: Sequence[str], rows: Sequence[Sequence]) -> None:
        self.out.write(format_rows(columns, rows, self.config.output_format))

    def write_single(self, column: str, value) -> None:
        self.out.write(format_single(column, value, self.config.output_format))

    def open_index(self) -> AssociationStore:
        path = self.config.index_path
        if not path.exists():
            raise FileNotFoundError(f"index '{path}' not found; ingest data first")
        return load(path, freeze=False)

    def frozen_index(self) -> AssociationStore:
        store = self.open_index()
        if not store.frozen:
            raise StoreNotFrozenError(f"index '{self.config.index_path}' is not frozen; run 'freeze' first")
        return store

    def entity(self, store: AssociationStore, text: str) -> EntityId:
        try:
            entity = EntityId.parse(text)
        except ValueError:
            entity = None
        if entity is None or not store.has_entity(entity):
            known = [e.canonical for e in store.entities()]
            raise UnknownEntityError(text, format_suggestion(text, known))
        return entity

    def source(self, store: AssociationStore, name: str) -> str:
        try:
            store.get_source(name)
        except UnknownSourceError:
            known = [s.name for s in store.sources()]
            raise UnknownSourceError(name, format_suggestion(name, known)) from None
        return name


def _cmd_ingest(s: _Session) -> int:
    path = s.config.index_path
    store = load(path, freeze=False) if path.exists() else AssociationStore()
    kv_mode = KvMode.COMPOSITE if s.args.composite_keys else KvMode.LITERAL
    report = ingest(s.args.file, SourceKind(s.args.kind), s.args.source, store,
                    namespace=s.args.namespace, latest_only=s.args.latest_only, kv_mode=kv_mode)
    write_snapshot(store, path)
    s.write_rows(["metric", "value"], [
        ("source", report.source.name),
        ("kind", report.source.kind.value),
        ("accepted", report.accepted),
        ("errors", len(report.parse_errors)),
    ])
    s.err.write(format_parse_errors(s.args.file, report.parse_errors))
    for number, message in report.notices:
        s.err.write(f"{s.args.file}:{number}: note: {message}\n")
    return EXIT_DATA if report.parse_errors else EXIT_OK


def _cmd_alias(s: _Session) -> int:
    path = s.config.index_path
    store = load(path, freeze=False) if path.exists() else AssociationStore()
    try:
        alias = EntityId.parse(s.args.alias)
        target = EntityId.parse(s.args.target)
    except ValueError as e:
        raise UsageError(str(e)) from None
    store.add_alias(alias, target)
    write_snapshot(store, path)
    s.write_rows(["metric", "value"], [("alias", alias.canonical), ("target", store.resolve(alias).canonical)])
    return EXIT_OK


def _cmd_freeze(s: _Session) -> int:
    path = s.config.index_path
    store = load(path, freeze=False) if path.exists() else AssociationStore()
    save(store.freeze(), path)
    return EXIT_OK


def _cmd_stats(s: _Session) -> int:
    store = s.open_index()
    entities, features, pairs = store.cardinalities()
    s.write_rows(["metric", "value"], [
        ("entities", entities),
        ("features", features),
        ("associations", pairs),
        ("sources", len(store.sources())),
        ("frozen", "true" if store.frozen else "false"),
    ])
    return EXIT_OK


def _cmd_importance(s: _Session) -> int:
    store = s.frozen_index()
    entity = s.entity(store, s.args.entity)
    ranked = metrics.feature_importances(entity, store, view=s.config.view)[:s.args.top]
    s.write_rows(["feature", "bits"], [(f.canonical, value.bits) for f, value in ranked])
    return EXIT_OK


def _cmd_vector(s: _Session) -> int:
    store = s.frozen_index()
    vector = metrics.entity_vector(s.entity(store, s.args.entity), store, view=s.config.view)
    s.write_rows(["feature", "weight"], [(f.canonical, w) for f, w in sorted(vector.weights.items())])
    return EXIT_OK


def _cmd_neighbors(s: _Session) -> int:
    store = s.frozen_index()
    entity = s.entity(store, s.args.entity)
    found = metrics.neighbors(entity, s.config.top_k, store, use_normalized=s.config.normalized,
                              view=s.config.view)
    s.write_rows(["entity", "distance"],
                 [(other.canonical, result.pick(s.config.normalized)) for other, result in found])
    return EXIT_OK


def _cmd_distance(s: _Session) -> int:
    store = s.frozen_index()
    result = metrics.distance(s.entity(store, s.args.first), s.entity(store, s.args.second), store,
                              view=s.config.view)
    s.write_single("distance", result.pick(s.config.normalized))
    return EXIT_OK


def _cmd_source_distance(s: _Session) -> int:
    store = s.frozen_index()
    result = metrics.source_distance(s.source(store, s.args.first), s.source(store, s.args.second), store,
                                     view=s.config.view)
    s.write_single("distance", result.pick(s.config.normalized))
    return EXIT_OK


def _cmd_matrix(s: _Session) -> int:
    store = s.frozen_index()
    entities, values = metrics.distance_matrix(store, normalized=s.config.normalized, view=s.config.view)
    rows = [(entities[i].canonical, entities[j].canonical, float(values[i, j]))
            for i in range(len(entities)) for j in range(i + 1, len(entities))]
    s.write_rows(["entity1", "entity2", "distance"], rows)
    return EXIT_OK


def _cmd_export(s: _Session) -> int:
    store = s.open_index()
    s.write_rows(["entity", "feature", "count"],
                 [(e.canonical, f.canonical, n) for e, f, n in store.associations()])
    return EXIT_OK


def _cmd_save(s: _Session) -> int:
    written = save(s.frozen_index(), s.args.file)
    s.write_rows(["metric", "value"], [("bytes", written)])
    return EXIT_OK


def _cmd_load(s: _Session) -> int:
    store = load(s.args.file)
    written = write_snapshot(store, s.config.index_path)
    s.write_rows(["metric", "value"], [("bytes", written)])
    return EXIT_OK


COMMANDS: Dict[str, Callable[[_Session], int]] = {
    "ingest": _cmd_ingest,
    "alias": _cmd_alias,
    "freeze": _cmd_freeze,
    "stats": _cmd_stats,
    "importance": _cmd_importance,
    "vector": _cmd_vector,
    "neighbors": _cmd_neighbors,
    "distance": _cmd_distance,
    "source-distance": _cmd_source_distance,
    "matrix": _cmd_matrix,
    "export": _cmd_export,
    "save": _cmd_save,
    "load": _cmd_load,
}


def _view(args: argparse.Namespace) -> QueryView:
    if not hasattr(args, "feature_scope"):
        return STORED_FORM
    return QueryView(FeatureScope(args.feature_scope), latest_only=args.latest_only)


def run(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None,
        stderr: Optional[TextIO] = None) -> int:
    """Run one command and return its exit code."""
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        config = CliConfig(
            index_path=Path(args.index or os.environ.get(INDEX_ENV_VAR) or DEFAULT_INDEX_PATH),
            output_format=args.format,
            top_k=getattr(args, "top", DEFAULT_TOP_K),
            normalized=not getattr(args, "raw", False),
            view=_view(args),
        )
        return COMMANDS[args.command](_Session(config, args, out, err))
    except SystemExit as e:
        # --help and --version exit through argparse
        return e.code if isinstance(e.code, int) else EXIT_OK
    except UsageError as e:
        err.write(f"efgrid: usage error: {e}\n")
        return EXIT_USAGE
    except (UnknownEntityError, UnknownSourceError) as e:
        err.write(f"efgrid: {e}\n")
        return EXIT_DATA
    except (EfgridError, OSError, ValueError) as e:
        logger.debug("command failed", exc_info=True)
        err.write(f"efgrid: error: {e}\n")
        return EXIT_DATA


def run_cli():
    """Run the command-line interface."""
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT, stream=sys.stderr)
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    run_cli()
