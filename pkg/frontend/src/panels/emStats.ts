import type { TaskStats } from '../types.js';

export interface EmStatsHandlers {
  /** Fires when the estimated-precision value is clicked. */
  onPrecisionClick: () => void;
}

function fmt(value: number | null, digits = 4): string {
  return value == null ? 'NAN' : value.toFixed(digits);
}

export function renderEmStats(
  el: HTMLElement,
  stats: TaskStats,
  handlers: EmStatsHandlers,
): void {
  el.innerHTML = '';
  const title = document.createElement('h2');
  title.textContent = 'Matching Stats';
  el.appendChild(title);

  const table = document.createElement('table');
  table.className = 'em-stats';
  const rows: Array<[string, string, string | null]> = [
    ['left table size', String(stats.left_size), null],
    ['right table size', String(stats.right_size), null],
    ['candidate pairs', String(stats.candidate_count), null],
    ['matches found', stats.matches_found == null ? 'NAN' : String(stats.matches_found), null],
    ['estimated precision', fmt(stats.estimated_precision), 'estimated-precision'],
  ];
  if (stats.blocking_recall != null) {
    rows.push(['blocking recall', fmt(stats.blocking_recall), null]);
  }
  for (const [label, value, cellId] of rows) {
    const tr = document.createElement('tr');
    const th = document.createElement('th');
    th.textContent = label;
    const td = document.createElement('td');
    td.textContent = value;
    if (cellId) {
      td.dataset.cell = cellId;
      td.classList.add('clickable');
      td.title = 'Click to label a sample of predicted matches';
      td.addEventListener('click', () => handlers.onPrecisionClick());
    }
    tr.append(th, td);
    table.appendChild(tr);
  }
  el.appendChild(table);

  if (stats.estimated_precision != null) {
    const note = document.createElement('p');
    note.className = 'note';
    note.textContent = `based on ${stats.precision_label_count} labels`;
    el.appendChild(note);
  }
  if (stats.no_usable_lfs) {
    const warning = document.createElement('p');
    warning.className = 'warning';
    warning.textContent = 'no usable LFs: author one and apply';
    el.appendChild(warning);
  }
}
