"""HTTP API over the project layer.

One server manages the projects under a root directory; every endpoint
is mirrored by a CLI subcommand, so any number shown anywhere is
reproducible from the same project directory. Mutations on a project
are serialized through a per-project lock.
"""

from __future__ import annotations

import os
import re
import threading

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .labelmodel import AllAbstainError, NoPredictedMatchesError
from .lf import SpecFormatError, parse_spec
from .project import LFValidationError, Project, ProjectError

_PROJECT_ID_RE = re.compile(r"^[A-Za-z0-9_.-]+$")


class CreateProjectRequest(BaseModel):
    project_id: str
    left_path: str
    right_path: str
    id_column: str = "id"
    config: dict | None = None
    ground_truth_path: str | None = None


class UpsertLFRequest(BaseModel):
    text: str


class LabelRequest(BaseModel):
    left_id: str
    right_id: str
    value: str  # match | non-match | clear


class TraceRequest(BaseModel):
    lf: str  # an LF name, or full spec text
    left_id: str
    right_id: str


class _Registry:
    def __init__(self, root: str):
        self.root = root
        self._lock = threading.Lock()
        self._projects: dict[str, tuple[Project, threading.Lock]] = {}

    def open(self, project_id: str) -> tuple[Project, threading.Lock]:
        with self._lock:
            entry = self._projects.get(project_id)
            if entry is None:
                path = os.path.join(self.root, project_id)
                try:
                    entry = (Project.load(path), threading.Lock())
                except (ProjectError, FileNotFoundError):
                    raise HTTPException(404, f"no project {project_id!r}")
                self._projects[project_id] = entry
            return entry

    def register(self, project_id: str, project: Project) -> None:
        with self._lock:
            self._projects[project_id] = (project, threading.Lock())

    def ids(self) -> list[str]:
        if not os.path.isdir(self.root):
            return []
        return sorted(
            d for d in os.listdir(self.root)
            if os.path.exists(os.path.join(self.root, d, "config.json"))
        )


def create_app(root: str) -> FastAPI:
    app = FastAPI(title="weakmatch", version="0.1.0")
    registry = _Registry(root)
    app.state.registry = registry

    @app.exception_handler(ProjectError)
    async def _project_error(_request, exc: ProjectError):
        raise HTTPException(400, str(exc))

    @app.get("/projects")
    def list_projects():
        return {"projects": registry.ids()}

    @app.post("/projects")
    def create_project(req: CreateProjectRequest):
        if not _PROJECT_ID_RE.match(req.project_id):
            raise HTTPException(400, f"bad project id {req.project_id!r}")
        path = os.path.join(root, req.project_id)
        try:
            project = Project.create(
                path, req.left_path, req.right_path, req.id_column,
                config=req.config, ground_truth_path=req.ground_truth_path,
            )
        except (ProjectError, ValueError) as e:
            raise HTTPException(400, f"create failed: {e}")
        registry.register(req.project_id, project)
        return {"project_id": req.project_id, "stats": project.stats()}

    @app.get("/projects/{pid}/stats")
    def get_stats(pid: str):
        project, _ = registry.open(pid)
        return project.stats()

    @app.get("/projects/{pid}/lfs")
    def list_lfs(pid: str):
        project, _ = registry.open(pid)
        return {"lfs": project.list_lfs()}

    @app.put("/projects/{pid}/lfs/{name}")
    def upsert_lf(pid: str, name: str, req: UpsertLFRequest):
        project, lock = registry.open(pid)
        try:
            spec = parse_spec(req.text)
        except SpecFormatError as e:
            raise HTTPException(422, detail={"diagnostics": [str(e)]})
        if spec.name != name:
            raise HTTPException(400, f"spec names {spec.name!r}, URL says {name!r}")
        with lock:
            try:
                return project.upsert_lf(spec)
            except LFValidationError as e:
                raise HTTPException(422, detail={"diagnostics": e.diagnostics})

    @app.delete("/projects/{pid}/lfs/{name}")
    def delete_lf(pid: str, name: str):
        project, lock = registry.open(pid)
        with lock:
            project.delete_lf(name)
        return {"deleted": name}

    @app.post("/projects/{pid}/apply")
    def apply_and_fit(pid: str):
        project, lock = registry.open(pid)
        with lock:
            try:
                return project.apply_and_fit()
            except AllAbstainError as e:
                raise HTTPException(
                    409,
                    detail={"error": str(e), "stats": project.stats()},
                )

    @app.get("/projects/{pid}/sample")
    def get_sample(pid: str, kind: str = "smart", n: int = 10):
        project, lock = registry.open(pid)
        with lock:
            try:
                rows = project.get_sample(kind, n)
            except NoPredictedMatchesError as e:
                raise HTTPException(409, str(e))
        return {"kind": kind, "rows": rows}

    @app.post("/projects/{pid}/labels")
    def label_pair(pid: str, req: LabelRequest):
        project, lock = registry.open(pid)
        with lock:
            stats = project.label_pair(req.left_id, req.right_id, req.value)
        return {"stats": stats}

    @app.get("/projects/{pid}/drilldown")
    def drilldown(pid: str, lf: str, kind: str = "fp"):
        project, _ = registry.open(pid)
        return {"lf": lf, "kind": kind, "rows": project.drilldown(lf, kind)}

    @app.post("/projects/{pid}/trace")
    def trace_lf(pid: str, req: TraceRequest):
        project, _ = registry.open(pid)
        try:
            return project.trace_lf(req.lf, req.left_id, req.right_id)
        except LFValidationError as e:
            raise HTTPException(422, detail={"diagnostics": e.diagnostics})

    @app.get("/projects/{pid}/export", response_class=PlainTextResponse)
    def export_matches(pid: str):
        project, _ = registry.open(pid)
        return project.export_matches()

    return app
