import { describe, expect, it } from 'vitest';

import { nextSortState, sortRows } from '../src/sort.js';

describe('nextSortState', () => {
  it('starts descending on a new column', () => {
    expect(nextSortState(null, 'est_fpr')).toEqual({ key: 'est_fpr', descending: true });
  });

  it('toggles direction on the same column', () => {
    const first = nextSortState(null, 'coverage');
    const second = nextSortState(first, 'coverage');
    expect(second).toEqual({ key: 'coverage', descending: false });
    expect(nextSortState(second, 'coverage').descending).toBe(true);
  });

  it('resets to descending when switching columns', () => {
    const state = nextSortState(nextSortState(null, 'a'), 'b');
    expect(state).toEqual({ key: 'b', descending: true });
  });
});

describe('sortRows', () => {
  const rows = [
    { name: 'a', score: 0.2 },
    { name: 'b', score: 0.9 },
    { name: 'c', score: 0.5 },
  ];

  it('sorts numbers descending', () => {
    const sorted = sortRows(rows, { key: 'score', descending: true });
    expect(sorted.map((r) => r.name)).toEqual(['b', 'c', 'a']);
  });

  it('sorts numbers ascending', () => {
    const sorted = sortRows(rows, { key: 'score', descending: false });
    expect(sorted.map((r) => r.name)).toEqual(['a', 'c', 'b']);
  });

  it('sorts strings', () => {
    const sorted = sortRows(rows, { key: 'name', descending: false });
    expect(sorted.map((r) => r.name)).toEqual(['a', 'b', 'c']);
  });

  it('does not mutate the input', () => {
    sortRows(rows, { key: 'score', descending: true });
    expect(rows[0].name).toBe('a');
  });

  it('is stable and sinks missing values', () => {
    const mixed = [
      { name: 'x', score: null },
      { name: 'y', score: 1 },
      { name: 'z', score: 1 },
    ];
    const sorted = sortRows(mixed as never, { key: 'score', descending: true });
    expect(sorted.map((r: { name: string }) => r.name)).toEqual(['y', 'z', 'x']);
  });
});
