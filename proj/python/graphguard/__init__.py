"""Contrastive graph scoring of card transactions (C++ core)."""

from ._core import (
    Config,
    Error,
    SchemaError,
    Table,
    UndefinedMetric,
    __version__,
    anomaly_score,
    f1_at,
    graph_edges,
    load_dataset,
    npr_at_k,
    pr_auc,
    render_table,
    run_grid,
    run_split,
    select_threshold,
    write_dataset,
)

__all__ = [
    "Config",
    "Error",
    "SchemaError",
    "Table",
    "UndefinedMetric",
    "__version__",
    "anomaly_score",
    "f1_at",
    "graph_edges",
    "load_dataset",
    "npr_at_k",
    "pr_auc",
    "render_table",
    "run_grid",
    "run_split",
    "select_threshold",
    "write_dataset",
]
