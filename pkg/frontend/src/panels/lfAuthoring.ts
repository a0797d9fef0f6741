import type { LfEntry, TraceResult } from '../types.js';

export interface LfAuthoringHandlers {
  onSave: (text: string) => void;
  onApply: () => void;
  onTrace: (text: string) => void;
  onCopyAuto: (entry: LfEntry) => void;
  onDelete: (name: string) => void;
}

export interface AuthoringState {
  editorText: string;
  diagnostics: string[];
  statusLine: string;
  applying: boolean;
  trace: TraceResult | null;
}

export function renderLfAuthoring(
  el: HTMLElement,
  lfs: LfEntry[],
  state: AuthoringState,
  handlers: LfAuthoringHandlers,
): void {
  el.innerHTML = '';
  const title = document.createElement('h2');
  title.textContent = 'LF Authoring';
  el.appendChild(title);

  const list = document.createElement('ul');
  list.className = 'lf-list';
  for (const entry of lfs) {
    const li = document.createElement('li');
    li.dataset.lf = entry.name;
    const label = document.createElement('span');
    label.textContent = `${entry.name} (${entry.origin})`;
    li.appendChild(label);
    if (entry.origin === 'auto') {
      // auto LFs are read-only; users copy them into editable ones
      const copy = document.createElement('button');
      copy.textContent = 'copy as new LF';
      copy.dataset.action = 'copy-auto';
      copy.addEventListener('click', () => handlers.onCopyAuto(entry));
      li.appendChild(copy);
    } else {
      const del = document.createElement('button');
      del.textContent = 'delete';
      del.dataset.action = 'delete-lf';
      del.addEventListener('click', () => handlers.onDelete(entry.name));
      li.appendChild(del);
    }
    list.appendChild(li);
  }
  el.appendChild(list);

  const editor = document.createElement('textarea');
  editor.className = 'lf-editor';
  editor.rows = 14;
  editor.value = state.editorText;
  el.appendChild(editor);

  if (state.diagnostics.length) {
    const box = document.createElement('ul');
    box.className = 'diagnostics';
    for (const d of state.diagnostics) {
      const li = document.createElement('li');
      li.textContent = d;
      box.appendChild(li);
    }
    el.appendChild(box);
  }

  const toolbar = document.createElement('div');
  toolbar.className = 'toolbar';
  const save = document.createElement('button');
  save.textContent = 'Save LF';
  save.dataset.action = 'save-lf';
  save.addEventListener('click', () => handlers.onSave(editor.value));
  const apply = document.createElement('button');
  apply.textContent = state.applying ? 'Applying...' : 'Apply';
  apply.dataset.action = 'apply';
  apply.disabled = state.applying;
  apply.addEventListener('click', () => handlers.onApply());
  const traceButton = document.createElement('button');
  traceButton.textContent = 'Dry-run on selected pair';
  traceButton.dataset.action = 'trace';
  traceButton.addEventListener('click', () => handlers.onTrace(editor.value));
  toolbar.append(save, apply, traceButton);
  el.appendChild(toolbar);

  const status = document.createElement('p');
  status.className = 'status';
  status.textContent = state.statusLine;
  el.appendChild(status);

  if (state.trace) {
    const t = state.trace;
    const pre = document.createElement('pre');
    pre.className = 'trace';
    const lines = [
      `${t.lf} on (${t.pair[0]}, ${t.pair[1]})`,
      `left:  ${t.left_text}`,
      `right: ${t.right_text}`,
    ];
    if (t.similarity != null) lines.push(`similarity: ${t.similarity.toFixed(4)}`);
    if (t.left_capture !== undefined) {
      lines.push(`captures: ${t.left_capture ?? 'none'} vs ${t.right_capture ?? 'none'}`);
    }
    lines.push(`vote: ${t.vote}`);
    pre.textContent = lines.join('\n');
    el.appendChild(pre);
  }
}
