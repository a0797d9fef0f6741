import type { DrillKind, LfStatsEntry } from '../types.js';
import { SortState, sortRows } from '../sort.js';

export interface LfStatsHandlers {
  onSort: (column: string) => void;
  onShowSpec: (name: string) => void;
  onDrilldown: (name: string, kind: DrillKind) => void;
}

const COLUMNS: Array<{ key: keyof LfStatsEntry; label: string }> = [
  { key: 'name', label: 'LF' },
  { key: 'n_match', label: 'matches' },
  { key: 'n_unmatch', label: 'non-matches' },
  { key: 'n_abstain', label: 'abstains' },
  { key: 'coverage', label: 'coverage' },
  { key: 'est_fpr', label: 'est. FPR' },
  { key: 'est_fnr', label: 'est. FNR' },
];

export function renderLfStats(
  el: HTMLElement,
  entries: LfStatsEntry[],
  sortState: SortState | null,
  handlers: LfStatsHandlers,
): void {
  el.innerHTML = '';
  const title = document.createElement('h2');
  title.textContent = 'LF Stats';
  el.appendChild(title);

  if (!entries.length) {
    const hint = document.createElement('p');
    hint.className = 'note';
    hint.textContent = 'no LFs yet: author one in the panel below';
    el.appendChild(hint);
    return;
  }

  const rows = sortState
    ? sortRows(entries as unknown as Record<string, unknown>[], sortState) as unknown as LfStatsEntry[]
    : entries;

  const table = document.createElement('table');
  table.className = 'lf-stats';
  const head = document.createElement('tr');
  for (const col of COLUMNS) {
    const th = document.createElement('th');
    th.textContent = col.label;
    th.dataset.column = col.key;
    th.classList.add('clickable');
    if (sortState && sortState.key === col.key) {
      th.classList.add(sortState.descending ? 'sorted-desc' : 'sorted-asc');
    }
    th.addEventListener('click', () => handlers.onSort(col.key));
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const entry of rows) {
    const tr = document.createElement('tr');
    tr.dataset.lf = entry.name;
    for (const col of COLUMNS) {
      const td = document.createElement('td');
      const value = entry[col.key];
      td.textContent = typeof value === 'number' && !Number.isInteger(value)
        ? value.toFixed(4)
        : String(value);
      td.dataset.column = col.key;
      if (col.key === 'name') {
        td.classList.add('clickable');
        td.addEventListener('click', () => handlers.onShowSpec(entry.name));
      } else if (col.key === 'est_fpr' || col.key === 'est_fnr') {
        td.classList.add('clickable');
        const kind: DrillKind = col.key === 'est_fpr' ? 'fp' : 'fn';
        td.addEventListener('click', () => handlers.onDrilldown(entry.name, kind));
      }
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  el.appendChild(table);
}
