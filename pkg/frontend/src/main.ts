import { WorkbenchClient } from './api.js';
import { WorkbenchApp } from './app.js';

function required(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing panel element #${id}`);
  return el;
}

export function boot(): WorkbenchApp {
  const params = new URLSearchParams(window.location.search);
  const base = params.get('service') ?? 'http://127.0.0.1:8000';
  const projectId = params.get('project') ?? 'demo';
  const client = new WorkbenchClient(base, projectId);
  const app = new WorkbenchApp(client, {
    emStats: required('em-stats'),
    lfStats: required('lf-stats'),
    dataViewer: required('data-viewer'),
    lfAuthoring: required('lf-authoring'),
  });
  void app.load();
  return app;
}

if (typeof window !== 'undefined' && document.getElementById('em-stats')) {
  boot();
}
