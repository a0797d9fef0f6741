import type {
  ApplyResult,
  DrillKind,
  LabelValue,
  LfEntry,
  PairRow,
  SampleKind,
  TaskStats,
  TraceResult,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public diagnostics: string[] = [],
  ) {
    super(message);
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let message = `${res.status} ${res.statusText}`;
  let diagnostics: string[] = [];
  try {
    const body = await res.json();
    const detail = body.detail;
    if (typeof detail === 'string') {
      message = detail;
    } else if (detail && Array.isArray(detail.diagnostics)) {
      diagnostics = detail.diagnostics;
      message = diagnostics.join('; ');
    } else if (detail && detail.error) {
      message = detail.error;
    }
  } catch {
    // non-JSON error body: keep the status line
  }
  return new ApiError(res.status, message, diagnostics);
}

/** Typed client for one project on the workbench service. */
export class WorkbenchClient {
  constructor(
    private base: string,
    private projectId: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return `${this.base}/projects/${encodeURIComponent(this.projectId)}${path}`;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.url(path), init);
    if (!res.ok) {
      throw await parseError(res);
    }
    return (await res.json()) as T;
  }

  getStats(): Promise<TaskStats> {
    return this.request<TaskStats>('/stats');
  }

  async listLfs(): Promise<LfEntry[]> {
    const body = await this.request<{ lfs: LfEntry[] }>('/lfs');
    return body.lfs;
  }

  upsertLf(name: string, text: string): Promise<{ name: string; version: string }> {
    return this.request(`/lfs/${encodeURIComponent(name)}`, {
      method: 'PUT',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ text }),
    });
  }

  deleteLf(name: string): Promise<{ deleted: string }> {
    return this.request(`/lfs/${encodeURIComponent(name)}`, { method: 'DELETE' });
  }

  apply(): Promise<ApplyResult> {
    return this.request<ApplyResult>('/apply', { method: 'POST' });
  }

  async getSample(kind: SampleKind, n: number): Promise<PairRow[]> {
    const body = await this.request<{ rows: PairRow[] }>(`/sample?kind=${kind}&n=${n}`);
    return body.rows;
  }

  async labelPair(leftId: string, rightId: string, value: LabelValue): Promise<TaskStats> {
    const body = await this.request<{ stats: TaskStats }>('/labels', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ left_id: leftId, right_id: rightId, value }),
    });
    return body.stats;
  }

  async drilldown(lf: string, kind: DrillKind): Promise<PairRow[]> {
    const body = await this.request<{ rows: PairRow[] }>(
      `/drilldown?lf=${encodeURIComponent(lf)}&kind=${kind}`,
    );
    return body.rows;
  }

  trace(lf: string, leftId: string, rightId: string): Promise<TraceResult> {
    return this.request<TraceResult>('/trace', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ lf, left_id: leftId, right_id: rightId }),
    });
  }
}

export async function createProject(
  base: string,
  options: {
    projectId: string;
    leftPath: string;
    rightPath: string;
    idColumn?: string;
    groundTruthPath?: string;
  },
  fetchFn: typeof fetch = fetch,
): Promise<TaskStats> {
  const res = await fetchFn(`${base}/projects`, {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify({
      project_id: options.projectId,
      left_path: options.leftPath,
      right_path: options.rightPath,
      id_column: options.idColumn ?? 'id',
      ground_truth_path: options.groundTruthPath ?? null,
    }),
  });
  if (!res.ok) {
    throw await parseError(res);
  }
  const body = await res.json();
  return body.stats as TaskStats;
}
