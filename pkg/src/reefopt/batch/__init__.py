"""Independent-run execution for seed sweeps and substrate comparisons."""

from .runner import JobResult, RunJob, VariantStats, execute_job, run_jobs, summarize

__all__ = ["JobResult", "RunJob", "VariantStats", "execute_job", "run_jobs", "summarize"]
