import { beforeEach, describe, expect, it, vi } from 'vitest';

import { renderDataViewer } from '../src/panels/dataViewer.js';
import { renderEmStats } from '../src/panels/emStats.js';
import { renderLfAuthoring } from '../src/panels/lfAuthoring.js';
import { renderLfStats } from '../src/panels/lfStats.js';
import type { LfStatsEntry, PairRow, TaskStats } from '../src/types.js';

const STATS: TaskStats = {
  left_size: 200,
  right_size: 200,
  candidate_count: 1746,
  matches_found: 171,
  estimated_precision: null,
  precision_label_count: 0,
  blocking_recall: 0.95,
  no_usable_lfs: false,
};

const LF_STATS: LfStatsEntry[] = [
  { name: 'auto_lf_0', origin: 'auto', n_match: 170, n_unmatch: 0, n_abstain: 1576,
    coverage: 0.097, est_fpr: 0.0102, est_fnr: 0 },
  { name: 'name_overlap', origin: 'user', n_match: 220, n_unmatch: 900, n_abstain: 626,
    coverage: 0.64, est_fpr: 0.1663, est_fnr: 0.024 },
];

const ROWS: PairRow[] = [
  { left_id: 'L1', right_id: 'R1', schema: ['name', 'price'],
    left: ['Sony Switcher', '49.00'], right: ['Sony AV Switcher', '44.99'],
    ground_truth: null, likelihood: 0.51 },
  { left_id: 'L2', right_id: 'R2', schema: ['name', 'price'],
    left: ['Bravia 40in', '1399'], right: ['Bravia 46in', '1699'],
    ground_truth: 'non-match', likelihood: 0.87 },
];

let el: HTMLElement;

beforeEach(() => {
  el = document.createElement('div');
  document.body.appendChild(el);
});

describe('em stats panel', () => {
  it('renders NAN before any labels exist', () => {
    renderEmStats(el, STATS, { onPrecisionClick: vi.fn() });
    const cell = el.querySelector('[data-cell="estimated-precision"]');
    expect(cell?.textContent).toBe('NAN');
  });

  it('click on estimated precision triggers the handler', () => {
    const onPrecisionClick = vi.fn();
    renderEmStats(el, STATS, { onPrecisionClick });
    (el.querySelector('[data-cell="estimated-precision"]') as HTMLElement).click();
    expect(onPrecisionClick).toHaveBeenCalledOnce();
  });

  it('shows the label count once precision is known', () => {
    renderEmStats(el, { ...STATS, estimated_precision: 0.7, precision_label_count: 10 },
                  { onPrecisionClick: vi.fn() });
    expect(el.textContent).toContain('0.7000');
    expect(el.textContent).toContain('based on 10 labels');
  });

  it('warns when no LFs are usable', () => {
    renderEmStats(el, { ...STATS, no_usable_lfs: true }, { onPrecisionClick: vi.fn() });
    expect(el.querySelector('.warning')?.textContent).toContain('no usable LFs');
  });
});

describe('lf stats panel', () => {
  const handlers = () => ({
    onSort: vi.fn(),
    onShowSpec: vi.fn(),
    onDrilldown: vi.fn(),
  });

  it('renders one row per LF with all columns', () => {
    renderLfStats(el, LF_STATS, null, handlers());
    const rows = el.querySelectorAll('tr[data-lf]');
    expect(rows).toHaveLength(2);
    expect(el.textContent).toContain('0.1663');
  });

  it('header click reports the column', () => {
    const h = handlers();
    renderLfStats(el, LF_STATS, null, h);
    (el.querySelector('th[data-column="est_fpr"]') as HTMLElement).click();
    expect(h.onSort).toHaveBeenCalledWith('est_fpr');
  });

  it('sort state reorders rows', () => {
    renderLfStats(el, LF_STATS, { key: 'est_fpr', descending: true }, handlers());
    const names = [...el.querySelectorAll('tr[data-lf]')].map(
      (tr) => (tr as HTMLElement).dataset.lf);
    expect(names).toEqual(['name_overlap', 'auto_lf_0']);
  });

  it('name click shows the spec, stat cell click opens a drilldown', () => {
    const h = handlers();
    renderLfStats(el, LF_STATS, null, h);
    const row = el.querySelector('tr[data-lf="name_overlap"]') as HTMLElement;
    (row.querySelector('td[data-column="name"]') as HTMLElement).click();
    expect(h.onShowSpec).toHaveBeenCalledWith('name_overlap');
    (row.querySelector('td[data-column="est_fpr"]') as HTMLElement).click();
    expect(h.onDrilldown).toHaveBeenCalledWith('name_overlap', 'fp');
    (row.querySelector('td[data-column="est_fnr"]') as HTMLElement).click();
    expect(h.onDrilldown).toHaveBeenCalledWith('name_overlap', 'fn');
  });

  it('empty store shows an authoring hint', () => {
    renderLfStats(el, [], null, handlers());
    expect(el.textContent).toContain('no LFs yet');
  });
});

describe('data viewer panel', () => {
  const handlers = () => ({
    onShowSmartSample: vi.fn(),
    onLabel: vi.fn(),
    onSortByScore: vi.fn(),
    onSelect: vi.fn(),
  });

  it('renders two styled sub-rows per pair', () => {
    renderDataViewer(el, ROWS, 'smart sample', handlers());
    expect(el.querySelectorAll('tr.row-left')).toHaveLength(2);
    expect(el.querySelectorAll('tr.row-right')).toHaveLength(2);
  });

  it('left click labels match, right click labels non-match', () => {
    const h = handlers();
    renderDataViewer(el, ROWS, 'smart sample', h);
    const gt = el.querySelector('td[data-cell="gt"]') as HTMLElement;
    gt.click();
    expect(h.onLabel).toHaveBeenCalledWith('L1', 'R1', 'match');
    gt.dispatchEvent(new MouseEvent('contextmenu', { bubbles: true, cancelable: true }));
    expect(h.onLabel).toHaveBeenCalledWith('L1', 'R1', 'non-match');
  });

  it('shows existing ground truth as M/U', () => {
    renderDataViewer(el, ROWS, 'x', handlers());
    const cells = [...el.querySelectorAll('td[data-cell="gt"]')];
    expect(cells.map((c) => c.textContent)).toEqual(['', 'U']);
  });

  it('show button requests the smart sample', () => {
    const h = handlers();
    renderDataViewer(el, [], 'x', h);
    (el.querySelector('[data-action="show-smart-sample"]') as HTMLElement).click();
    expect(h.onShowSmartSample).toHaveBeenCalledOnce();
  });

  it('score header click requests a sort', () => {
    const h = handlers();
    renderDataViewer(el, ROWS, 'x', h);
    (el.querySelector('th[data-column="score"]') as HTMLElement).click();
    expect(h.onSortByScore).toHaveBeenCalledOnce();
  });

  it('empty rows show a notice and the provenance banner stays', () => {
    renderDataViewer(el, [], 'smart sample: no likely missed matches', handlers());
    expect(el.querySelector('.provenance')?.textContent).toContain('no likely missed');
    expect(el.textContent).toContain('nothing to show');
  });
});

describe('lf authoring panel', () => {
  const state = () => ({
    editorText: 'name = "x"\n',
    diagnostics: [],
    statusLine: '',
    applying: false,
    trace: null,
  });
  const handlers = () => ({
    onSave: vi.fn(),
    onApply: vi.fn(),
    onTrace: vi.fn(),
    onCopyAuto: vi.fn(),
    onDelete: vi.fn(),
  });

  it('save passes the editor text', () => {
    const h = handlers();
    renderLfAuthoring(el, [], state(), h);
    const editor = el.querySelector('textarea') as HTMLTextAreaElement;
    editor.value = 'name = "y"\n';
    (el.querySelector('[data-action="save-lf"]') as HTMLElement).click();
    expect(h.onSave).toHaveBeenCalledWith('name = "y"\n');
  });

  it('renders diagnostics inline', () => {
    renderLfAuthoring(el, [], { ...state(), diagnostics: ['t_lo < t_hi violated'] },
                      handlers());
    expect(el.querySelector('.diagnostics')?.textContent).toContain('t_lo < t_hi');
  });

  it('auto LFs get a copy button, user LFs a delete button', () => {
    const h = handlers();
    const lfs = [
      { name: 'auto_lf_0', origin: 'auto', version: 'v1', text: 'name = "auto_lf_0"\norigin = "auto"\n' },
      { name: 'mine', origin: 'user', version: 'v2', text: 'name = "mine"\n' },
    ];
    renderLfAuthoring(el, lfs, state(), h);
    const autoRow = el.querySelector('li[data-lf="auto_lf_0"]') as HTMLElement;
    (autoRow.querySelector('[data-action="copy-auto"]') as HTMLElement).click();
    expect(h.onCopyAuto).toHaveBeenCalled();
    const userRow = el.querySelector('li[data-lf="mine"]') as HTMLElement;
    expect(userRow.querySelector('[data-action="copy-auto"]')).toBeNull();
    (userRow.querySelector('[data-action="delete-lf"]') as HTMLElement).click();
    expect(h.onDelete).toHaveBeenCalledWith('mine');
  });

  it('apply button disabled while applying', () => {
    renderLfAuthoring(el, [], { ...state(), applying: true }, handlers());
    const button = el.querySelector('[data-action="apply"]') as HTMLButtonElement;
    expect(button.disabled).toBe(true);
    expect(button.textContent).toContain('Applying');
  });

  it('renders a similarity trace', () => {
    renderLfAuthoring(el, [], {
      ...state(),
      trace: {
        lf: 'name_overlap', pair: ['L1', 'R1'] as [string, string],
        left_text: 'Sony Switcher', right_text: 'Sony AV Switcher',
        similarity: 0.75, vote: 1,
      },
    }, handlers());
    const pre = el.querySelector('pre.trace');
    expect(pre?.textContent).toContain('similarity: 0.7500');
    expect(pre?.textContent).toContain('vote: 1');
  });
});
