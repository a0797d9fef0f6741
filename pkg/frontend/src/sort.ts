export interface SortState {
  key: string;
  descending: boolean;
}

/** Toggle direction when re-clicking the same column, else sort descending. */
export function nextSortState(current: SortState | null, key: string): SortState {
  if (current && current.key === key) {
    return { key, descending: !current.descending };
  }
  return { key, descending: true };
}

/** Stable sort of row objects by one key; missing values sink to the end. */
export function sortRows<T extends Record<string, unknown>>(
  rows: T[],
  state: SortState,
): T[] {
  const indexed = rows.map((row, i) => ({ row, i }));
  indexed.sort((a, b) => {
    const va = a.row[state.key];
    const vb = b.row[state.key];
    if (va == null && vb == null) return a.i - b.i;
    if (va == null) return 1;
    if (vb == null) return -1;
    let cmp: number;
    if (typeof va === 'number' && typeof vb === 'number') {
      cmp = va - vb;
    } else {
      cmp = String(va) < String(vb) ? -1 : String(va) > String(vb) ? 1 : 0;
    }
    if (cmp === 0) return a.i - b.i;
    return state.descending ? -cmp : cmp;
  });
  return indexed.map((x) => x.row);
}
