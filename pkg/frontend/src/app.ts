import { ApiError, WorkbenchClient } from './api.js';
import { renderDataViewer } from './panels/dataViewer.js';
import { renderEmStats } from './panels/emStats.js';
import { renderLfAuthoring, AuthoringState } from './panels/lfAuthoring.js';
import { renderLfStats } from './panels/lfStats.js';
import { SortState, nextSortState, sortRows } from './sort.js';
import type { DrillKind, LabelValue, LfEntry, LfStatsEntry, PairRow, TaskStats } from './types.js';

export interface PanelElements {
  emStats: HTMLElement;
  lfStats: HTMLElement;
  dataViewer: HTMLElement;
  lfAuthoring: HTMLElement;
}

/**
 * The four-panel workbench. All numbers shown are fetched from the
 * service; the client only arranges and sorts them.
 */
export class WorkbenchApp {
  stats: TaskStats | null = null;
  lfStats: LfStatsEntry[] = [];
  lfs: LfEntry[] = [];
  viewerRows: PairRow[] = [];
  viewerProvenance = 'nothing loaded yet';
  selectedPair: PairRow | null = null;
  lfSort: SortState | null = null;
  scoreSortDescending = true;
  authoring: AuthoringState = {
    editorText: '',
    diagnostics: [],
    statusLine: '',
    applying: false,
    trace: null,
  };

  constructor(
    private client: WorkbenchClient,
    private panels: PanelElements,
    private sampleSize = 10,
  ) {}

  async load(): Promise<void> {
    this.stats = await this.client.getStats();
    this.lfs = await this.client.listLfs();
    if (!this.stats.no_usable_lfs && this.stats.matches_found != null) {
      try {
        const result = await this.client.apply();
        this.stats = result.stats;
        this.lfStats = result.lf_stats;
      } catch {
        this.lfStats = [];
      }
    }
    this.renderAll();
  }

  renderAll(): void {
    if (this.stats) {
      renderEmStats(this.panels.emStats, this.stats, {
        onPrecisionClick: () => void this.showPrecisionSample(),
      });
    }
    renderLfStats(this.panels.lfStats, this.lfStats, this.lfSort, {
      onSort: (column) => this.sortLfStats(column),
      onShowSpec: (name) => this.showSpec(name),
      onDrilldown: (name, kind) => void this.showDrilldown(name, kind),
    });
    renderDataViewer(this.panels.dataViewer, this.viewerRows, this.viewerProvenance, {
      onShowSmartSample: () => void this.showSmartSample(),
      onLabel: (leftId, rightId, value) => void this.labelPair(leftId, rightId, value),
      onSortByScore: () => this.sortViewerByScore(),
      onSelect: (row) => {
        this.selectedPair = row;
      },
    });
    renderLfAuthoring(this.panels.lfAuthoring, this.lfs, this.authoring, {
      onSave: (text) => void this.saveLf(text),
      onApply: () => void this.applyAll(),
      onTrace: (text) => void this.traceLf(text),
      onCopyAuto: (entry) => this.copyAuto(entry),
      onDelete: (name) => void this.deleteLf(name),
    });
  }

  async showSmartSample(): Promise<void> {
    this.viewerRows = await this.client.getSample('smart', this.sampleSize);
    this.viewerProvenance = this.viewerRows.length
      ? `smart sample: top ${this.viewerRows.length} likely matches the model misses`
      : 'smart sample: no likely missed matches';
    this.renderAll();
  }

  async showPrecisionSample(): Promise<void> {
    try {
      this.viewerRows = await this.client.getSample('precision', this.sampleSize);
      this.viewerProvenance =
        `precision sample: ${this.viewerRows.length} predicted matches; ` +
        'label them to estimate precision';
    } catch (err) {
      this.viewerRows = [];
      this.viewerProvenance = `precision sample unavailable: ${(err as Error).message}`;
    }
    this.renderAll();
  }

  async showDrilldown(name: string, kind: DrillKind): Promise<void> {
    this.viewerRows = await this.client.drilldown(name, kind);
    const what = kind === 'fp' ? 'votes match, model says non-match'
      : 'votes non-match, model says match';
    this.viewerProvenance = `drilldown ${name} (${kind}): ${what}`;
    this.renderAll();
  }

  async labelPair(leftId: string, rightId: string, value: LabelValue): Promise<void> {
    try {
      this.stats = await this.client.labelPair(leftId, rightId, value);
    } catch (err) {
      this.viewerProvenance = `label failed: ${(err as Error).message}`;
      this.renderAll();
      return;
    }
    for (const row of this.viewerRows) {
      if (row.left_id === leftId && row.right_id === rightId) {
        row.ground_truth = value === 'clear' ? null : value;
      }
    }
    this.renderAll();
  }

  sortLfStats(column: string): void {
    this.lfSort = nextSortState(this.lfSort, column);
    this.renderAll();
  }

  sortViewerByScore(): void {
    const key = this.viewerRows.some((r) => r.likelihood != null)
      ? 'likelihood' : 'match_prob';
    this.viewerRows = sortRows(
      this.viewerRows as unknown as Record<string, unknown>[],
      { key, descending: this.scoreSortDescending },
    ) as unknown as PairRow[];
    this.scoreSortDescending = !this.scoreSortDescending;
    this.renderAll();
  }

  showSpec(name: string): void {
    const entry = this.lfs.find((lf) => lf.name === name);
    if (entry) {
      this.authoring.editorText = entry.text;
      this.authoring.diagnostics = [];
      this.authoring.statusLine = `showing ${name} v${entry.version.slice(0, 12)}`;
      this.renderAll();
    }
  }

  copyAuto(entry: LfEntry): void {
    const copyName = `${entry.name}_copy`;
    this.authoring.editorText = entry.text
      .replace(`name = "${entry.name}"`, `name = "${copyName}"`)
      .replace('origin = "auto"', 'origin = "user"');
    this.authoring.statusLine = `copied ${entry.name}; edit and save as ${copyName}`;
    this.renderAll();
  }

  async saveLf(text: string): Promise<void> {
    this.authoring.editorText = text;
    const nameMatch = text.match(/^name = "([^"]+)"/m);
    if (!nameMatch) {
      this.authoring.diagnostics = ['spec must declare: name = "<lf-name>"'];
      this.renderAll();
      return;
    }
    try {
      const result = await this.client.upsertLf(nameMatch[1], text);
      this.authoring.diagnostics = [];
      this.authoring.statusLine = `saved ${result.name} v${result.version.slice(0, 12)}`;
      this.lfs = await this.client.listLfs();
    } catch (err) {
      if (err instanceof ApiError && err.diagnostics.length) {
        this.authoring.diagnostics = err.diagnostics;
      } else {
        this.authoring.diagnostics = [(err as Error).message];
      }
    }
    this.renderAll();
  }

  async deleteLf(name: string): Promise<void> {
    await this.client.deleteLf(name);
    this.lfs = await this.client.listLfs();
    this.authoring.statusLine = `deleted ${name}`;
    this.renderAll();
  }

  async traceLf(text: string): Promise<void> {
    if (!this.selectedPair) {
      this.authoring.statusLine = 'select a pair in the data viewer first';
      this.renderAll();
      return;
    }
    const nameMatch = text.match(/^name = "([^"]+)"/m);
    const known = nameMatch && this.lfs.some((lf) => lf.name === nameMatch[1]);
    try {
      this.authoring.trace = await this.client.trace(
        known && nameMatch ? nameMatch[1] : text,
        this.selectedPair.left_id,
        this.selectedPair.right_id,
      );
      this.authoring.statusLine = '';
    } catch (err) {
      this.authoring.trace = null;
      this.authoring.statusLine = `dry-run failed: ${(err as Error).message}`;
    }
    this.renderAll();
  }

  async applyAll(): Promise<void> {
    // one apply in flight at a time; the button is disabled meanwhile
    if (this.authoring.applying) return;
    this.authoring.applying = true;
    this.renderAll();
    try {
      const result = await this.client.apply();
      this.stats = result.stats;
      this.lfStats = result.lf_stats;
      this.authoring.statusLine =
        `applied: ${result.lf_evaluations} LF evaluations, ` +
        `${result.iterations} model iterations`;
    } catch (err) {
      this.authoring.statusLine = `apply failed: ${(err as Error).message}`;
    } finally {
      this.authoring.applying = false;
    }
    this.renderAll();
  }
}
