"""orgmap: collaboration network induction, hierarchical workgroup
detection, freedom/fluidity metrics, network synthesis, themed workgroup
maps, and template-stamped decks."""

from .community import (
    SizeModularityCurve,
    WorkgroupHierarchy,
    detect_hierarchy,
    elbow_point,
    leiden,
    sweep_and_elbow,
)
from .embedding import EmbeddingPair, OmnibusMatrix, build_omnibus, spectral_embed
from .graph import (
    CollabGraph,
    DegreeStats,
    OrgTree,
    Partition,
    cpm_quality,
    largest_connected_component,
    modularity,
)
from .ingest import (
    MessageRecord,
    MonthlySeries,
    induce_longitudinal,
    induce_monthly,
    induce_series,
    load_org_snapshots,
    parse_message_log,
)
from .layout import LayoutConfig, LayoutResult, anneal_stage, fa2_stage, layout_pipeline
from .metrics import (
    FluidityScore,
    FreedomScore,
    Workgroup,
    aggregate_node_metric,
    fluidity,
    freedom,
    minimal_spanning_subtree,
    workgroups_of,
)
from .pipeline import PipelineConfig, PipelineError, run_pipeline
from .render import (
    MapSpec,
    QuadrantSpec,
    default_thresholds,
    pick_quadrant_callouts,
    render_map,
    render_quadrant,
)
from .synthesis import SynthConfig, SynthResult, synthesize, synthesize_metric
from .theming import (
    SliderState,
    Theme,
    derive_theme,
    invert_mode,
    theme_from_json,
    theme_to_json,
    validate_theme,
)

__version__ = "0.1.0"
