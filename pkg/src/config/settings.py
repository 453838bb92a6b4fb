"""
Configuration settings for efgrid
"""

import os
from typing import Dict, List

# Snapshot format
SNAPSHOT_HEADER: str = "efgrid-v1"
FORMAT_VERSION: int = 1
SNAPSHOT_ENCODING: str = "utf-8"

# Namespaces
GLOBAL_NAMESPACE: str = "global"
META_NAMESPACE: str = "source"

# Input formats
COMMENT_PREFIX: str = "#"
MAX_LINE_BYTES: int = 1024 * 1024
DOC_ID_FIELD: str = "_id"
DISPATCHER_PREFIX: str = "@"
COMPOSITE_KEY_SEPARATOR: str = "/"
BLANK_NODE_PREFIX: str = "_:"
GRAPH_ROOT_DIRECTIVE: str = "@root"
ROOT_FEATURE_KEY: str = "root"

# Metrics
FLOAT_TOLERANCE: float = 1e-9

# CLI output
DECIMAL_PLACES: int = 10
DEFAULT_TOP_K: int = 10
DEFAULT_OUTPUT_FORMAT: str = "tsv"
OUTPUT_FORMATS: List[str] = ["tsv", "json"]
DEFAULT_INDEX_PATH: str = "efgrid.idx"
INDEX_ENV_VAR: str = "EFGRID_INDEX"

# Exit codes
EXIT_OK: int = 0
EXIT_USAGE: int = 1
EXIT_DATA: int = 2

# Fuzzy matching configuration
FUZZY_MATCH_THRESHOLD: float = 70.0
FUZZY_MAX_SUGGESTIONS: int = 3

# Logging and progress
LOG_LEVEL: str = os.getenv("EFGRID_LOG_LEVEL", "WARNING").upper()
LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"
SHOW_PROGRESS: bool = os.getenv("EFGRID_PROGRESS", "0") == "1"

# Carrier kind names as accepted on the command line
CARRIER_KINDS: List[str] = ["kv", "wide", "doc", "rdf", "graph"]

# TSV column layouts, documented in --help
TSV_COLUMNS: Dict[str, str] = {
    "ingest": "metric<TAB>value (source, kind, accepted, errors)",
    "alias": "metric<TAB>value (alias, target)",
    "stats": "metric<TAB>value (entities, features, associations, sources, frozen)",
    "importance": "feature<TAB>bits",
    "vector": "feature<TAB>weight",
    "neighbors": "entity<TAB>distance",
    "distance": "distance",
    "source-distance": "distance",
    "matrix": "entity1<TAB>entity2<TAB>distance",
    "export": "entity<TAB>feature<TAB>count",
}
