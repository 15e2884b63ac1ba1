"""Pipeline simulation and streaming-AP evaluation."""

from streameval.coco import ground_truth_from_coco, load_coco_ground_truth
from streameval.evaluator import (
    EvalReport,
    FrameMatch,
    evaluate_sequences,
    streaming_ap,
)
from streameval.metrics import (
    IOU_THRESHOLDS,
    RECALL_THRESHOLDS,
    average_precision,
    count_matches,
)
from streameval.pipeline import simulate, world_digest
from streameval.stream_log import (
    STREAM_LOG_SCHEMA_VERSION,
    PipelineJob,
    StreamLog,
    load_stream_logs,
    query_buffer,
    save_stream_logs,
)

__all__ = [
    # Ground truth
    "ground_truth_from_coco",
    "load_coco_ground_truth",
    # Evaluation
    "EvalReport",
    "FrameMatch",
    "evaluate_sequences",
    "streaming_ap",
    # Metrics
    "IOU_THRESHOLDS",
    "RECALL_THRESHOLDS",
    "average_precision",
    "count_matches",
    # Simulation
    "simulate",
    "world_digest",
    # Stream logs
    "STREAM_LOG_SCHEMA_VERSION",
    "PipelineJob",
    "StreamLog",
    "load_stream_logs",
    "query_buffer",
    "save_stream_logs",
]
