import { ThemeClient } from './api';
import { StudioStore } from './store';
import { mountStudio } from './studio';

const SERVICE_URL =
  new URLSearchParams(window.location.search).get('service') ?? 'http://127.0.0.1:8756';

const store = new StudioStore(new ThemeClient(SERVICE_URL));
mountStudio(document.getElementById('app') as HTMLElement, store);
