"""Recency-bias audit primitives for LLM-based rerankers.

Thin Python surface over the C++ core: the date-injection schedule, the
listwise/pairwise prompt templates, model-output parsing with repair, and
the rank-shift / year-shift / correlation metric suite. The batch pipeline
(sliding-window experiments, caching, reports) lives in the `recbias` CLI.
"""

from recbias._core import (
    PROMPT_TEMPLATE_VERSION,
    __version__,
    aars,
    alrs,
    assigned_year,
    build_listwise_prompt,
    build_pairwise_prompt,
    injected_years,
    kendall_tau,
    parse_preference,
    parse_ranking,
    rank_shifts,
    render_date_prefix,
    render_ranking,
    t_test_one_sample,
    year_shift_groups,
    year_shift_topk,
)

__all__ = [
    "PROMPT_TEMPLATE_VERSION",
    "__version__",
    "aars",
    "alrs",
    "assigned_year",
    "build_listwise_prompt",
    "build_pairwise_prompt",
    "injected_years",
    "kendall_tau",
    "parse_preference",
    "parse_ranking",
    "rank_shifts",
    "render_date_prefix",
    "render_ranking",
    "t_test_one_sample",
    "year_shift_groups",
    "year_shift_topk",
]
