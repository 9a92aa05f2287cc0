"""HTTP facade over the job runner.

Endpoints mirror the CLI subcommands one-to-one: configs are validated by the
same pydantic models, and solver output is serialized by the same canonical
emitter, so a report fetched over HTTP is byte-identical to the CLI's file
output for the same config.
"""

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse, Response

from . import jobs, problems
from ._version import __version__
from .schemas import ExportRequest, JobConfig

__all__ = ["create_app", "app"]


def _report_response(report):
    return Response(content=jobs.report_json(report), media_type="application/json")


def create_app() -> FastAPI:
    app = FastAPI(title="floquet-hb", version=__version__)

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/catalog")
    def catalog():
        return {
            "problems": {name: list(ps) for name, ps in problems.catalog_entries().items()}
        }

    @app.post("/solve")
    def solve(cfg: JobConfig):
        try:
            return _report_response(jobs.run_job(cfg))
        except jobs.ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.post("/sweep")
    def sweep(cfg: JobConfig):
        try:
            return _report_response(jobs.run_sweep(cfg))
        except jobs.ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.post("/export")
    def export(req: ExportRequest):
        try:
            csv = jobs.export_solution(
                req.config, periods=req.periods, points_per_period=req.points_per_period
            )
        except jobs.ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except (problems.ProblemError, ValueError) as exc:
            raise HTTPException(status_code=409, detail=f"solver failed: {exc}") from exc
        return PlainTextResponse(content=csv, media_type="text/csv")

    return app


app = create_app()
