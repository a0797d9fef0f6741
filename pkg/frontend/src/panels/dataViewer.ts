import type { LabelValue, PairRow } from '../types.js';

export interface DataViewerHandlers {
  onShowSmartSample: () => void;
  onLabel: (leftId: string, rightId: string, value: LabelValue) => void;
  onSortByScore: () => void;
  onSelect: (row: PairRow) => void;
}

function gtSymbol(gt: PairRow['ground_truth']): string {
  if (gt === 'match') return 'M';
  if (gt === 'non-match') return 'U';
  return '';
}

/**
 * Tuple pairs side by side: two sub-rows per pair, left row styled blue
 * and right row purple. The first column (M/U) takes left-click for
 * match and right-click for non-match; the browser context menu is
 * suppressed there so the right-click can mean "non-match".
 */
export function renderDataViewer(
  el: HTMLElement,
  rows: PairRow[],
  provenance: string,
  handlers: DataViewerHandlers,
): void {
  el.innerHTML = '';
  const title = document.createElement('h2');
  title.textContent = 'Data Viewer';
  el.appendChild(title);

  const toolbar = document.createElement('div');
  toolbar.className = 'toolbar';
  const showButton = document.createElement('button');
  showButton.textContent = 'Show';
  showButton.dataset.action = 'show-smart-sample';
  showButton.title = 'Show likely matches the model currently misses';
  showButton.addEventListener('click', () => handlers.onShowSmartSample());
  toolbar.appendChild(showButton);
  el.appendChild(toolbar);

  const banner = document.createElement('p');
  banner.className = 'provenance';
  banner.textContent = provenance;
  el.appendChild(banner);

  if (!rows.length) {
    const note = document.createElement('p');
    note.className = 'note';
    note.textContent = 'nothing to show';
    el.appendChild(note);
    return;
  }

  const schema = rows[0].schema;
  const hasScore = rows.some((r) => r.likelihood != null || r.match_prob != null);
  const scoreLabel = rows[0].likelihood != null ? 'likelihood' : 'match prob';

  const table = document.createElement('table');
  table.className = 'data-viewer';
  const head = document.createElement('tr');
  const headers = ['M/U', 'id', ...schema];
  if (hasScore) headers.push(scoreLabel);
  for (const label of headers) {
    const th = document.createElement('th');
    th.textContent = label;
    if (hasScore && label === scoreLabel) {
      th.classList.add('clickable');
      th.dataset.column = 'score';
      th.addEventListener('click', () => handlers.onSortByScore());
    }
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const row of rows) {
    const score = row.likelihood ?? row.match_prob;
    const sides: Array<['left' | 'right', string, string[]]> = [
      ['left', row.left_id, row.left],
      ['right', row.right_id, row.right],
    ];
    for (const [side, id, values] of sides) {
      const tr = document.createElement('tr');
      tr.className = `row-${side}`;
      tr.dataset.pair = `${row.left_id}|${row.right_id}`;
      tr.addEventListener('click', () => handlers.onSelect(row));
      if (side === 'left') {
        const gt = document.createElement('td');
        gt.rowSpan = 2;
        gt.className = 'gt-cell clickable';
        gt.dataset.cell = 'gt';
        gt.textContent = gtSymbol(row.ground_truth);
        gt.title = 'left-click: match, right-click: non-match';
        gt.addEventListener('click', () =>
          handlers.onLabel(row.left_id, row.right_id, 'match'));
        gt.addEventListener('contextmenu', (event) => {
          event.preventDefault();
          handlers.onLabel(row.left_id, row.right_id, 'non-match');
        });
        tr.appendChild(gt);
      }
      const idCell = document.createElement('td');
      idCell.textContent = id;
      tr.appendChild(idCell);
      for (const value of values) {
        const td = document.createElement('td');
        td.textContent = value;
        tr.appendChild(td);
      }
      if (hasScore && side === 'left') {
        const td = document.createElement('td');
        td.rowSpan = 2;
        td.dataset.cell = 'score';
        td.textContent = score == null ? '' : score.toFixed(4);
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
  }
  el.appendChild(table);
}
