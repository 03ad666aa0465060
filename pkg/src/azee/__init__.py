try:
    from importlib.metadata import version as get_version

    version = get_version(__name__)
except ImportError:
    from pkg_resources import get_distribution

    version = get_distribution(__name__).version


from .grammar import (
    Grammar,
    lookup_rule,
    parse_grammar,
    parse_grammar_file,
    render_grammar,
    validate_grammar,
)
from .expr import (
    Apply,
    EllipsisNode,
    check,
    parse_expression,
    random_expression,
    render_inline,
    render_tree,
)
from .score import EvalConfig, Score, evaluate, export_score, resolve, total_duration
from .sembridge import export_graph, map_to_graph, parse_mapping, parse_mapping_file
from .stdlib import demo_cases, run_demo, std_grammar, std_mapping
