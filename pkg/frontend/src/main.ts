import { StudioApiClient } from './api.js';
import { UiDesignViewModel } from './viewModel.js';
import type { Rgb } from './types.js';

/** Minimal DOM wiring: pattern gallery, paint dialog, canvas editor, and the
 * try-on panel, all driven through the view model. */
export function mountStudio(root: HTMLElement, baseUrl: string): UiDesignViewModel {
  const api = new StudioApiClient(baseUrl);
  const vm = new UiDesignViewModel(api);

  root.innerHTML = `
    <div class="banner" hidden></div>
    <div class="gallery"></div>
    <div class="editor" hidden>
      <img class="render" alt="current design" />
      <input class="color" type="color" value="#b0b0b0" />
      <form class="paint-form">
        <input class="prompt" placeholder="Describe a print…" />
        <button type="submit">Generate</button>
      </form>
      <div class="paint-preview" hidden>
        <p class="refined"></p>
        <img class="paint" alt="generated paint" />
        <button class="accept" type="button">Use this paint</button>
      </div>
      <div class="avatars"></div>
      <img class="tryon" alt="try-on preview" hidden />
      <p class="tryon-message" hidden></p>
    </div>`;

  const el = <T extends HTMLElement>(selector: string): T => {
    const found = root.querySelector<T>(selector);
    if (!found) throw new Error(`missing element ${selector}`);
    return found;
  };

  const banner = el<HTMLDivElement>('.banner');
  const gallery = el<HTMLDivElement>('.gallery');
  const editor = el<HTMLDivElement>('.editor');
  const render = el<HTMLImageElement>('.render');

  const sync = () => {
    banner.hidden = !vm.errorBanner;
    banner.textContent = vm.errorBanner ?? '';
    editor.hidden = !vm.record;
    if (vm.lastRenderUrl) render.src = vm.lastRenderUrl;
    const preview = el<HTMLDivElement>('.paint-preview');
    preview.hidden = !vm.proposedPaint;
    if (vm.proposedPaint) {
      el<HTMLParagraphElement>('.refined').textContent = vm.proposedPaint.refined_prompt;
      el<HTMLImageElement>('.paint').src = `${baseUrl}${vm.proposedPaint.image_url}`;
    }
    const note = el<HTMLParagraphElement>('.tryon-message');
    note.hidden = !vm.tryOnMessage;
    note.textContent = vm.tryOnMessage ?? '';
    const tryon = el<HTMLImageElement>('.tryon');
    tryon.hidden = !vm.lastTryOnImage;
    if (vm.lastTryOnImage) {
      const copy = new Uint8Array(vm.lastTryOnImage).buffer as ArrayBuffer;
      tryon.src = URL.createObjectURL(new Blob([copy], { type: 'image/png' }));
    }
  };

  void vm.loadGallery().then(() => {
    gallery.replaceChildren(
      ...vm.patterns.map((pattern) => {
        const img = document.createElement('img');
        img.src = `${baseUrl}${pattern.thumbnail_url}`;
        img.alt = pattern.name;
        img.addEventListener('click', () => void vm.selectPattern(pattern.id).then(sync));
        return img;
      }),
    );
    sync();
  });

  el<HTMLInputElement>('.color').addEventListener('change', (event) => {
    const hex = (event.target as HTMLInputElement).value;
    const rgb: Rgb = [
      parseInt(hex.slice(1, 3), 16),
      parseInt(hex.slice(3, 5), 16),
      parseInt(hex.slice(5, 7), 16),
    ];
    void vm.setTargetColor(rgb).then(sync);
  });

  el<HTMLFormElement>('.paint-form').addEventListener('submit', (event) => {
    event.preventDefault();
    void vm.submitPrompt(el<HTMLInputElement>('.prompt').value).then(sync);
  });

  el<HTMLButtonElement>('.accept').addEventListener('click', () => {
    void vm.acceptPaint().then(sync);
  });

  let dragging = false;
  let last: [number, number] = [0, 0];
  render.addEventListener('pointerdown', (event) => {
    dragging = true;
    last = [event.offsetX, event.offsetY];
    vm.beginDrag();
  });
  render.addEventListener('pointermove', (event) => {
    if (!dragging) return;
    vm.dragBy(event.offsetX - last[0], event.offsetY - last[1]);
    last = [event.offsetX, event.offsetY];
  });
  render.addEventListener('pointerup', () => {
    dragging = false;
    void vm.endDrag().then(sync);
  });
  render.addEventListener('wheel', (event) => {
    event.preventDefault();
    vm.scaleBy(event.deltaY < 0 ? 1.1 : 1 / 1.1);
    void vm.endDrag().then(sync);
  });

  void vm.loadAvatars().then(() => {
    el<HTMLDivElement>('.avatars').replaceChildren(
      ...vm.avatars.map((avatar) => {
        const img = document.createElement('img');
        img.src = `${baseUrl}${avatar.preview_url}`;
        img.alt = avatar.avatar_id;
        img.addEventListener('click', () => void vm.requestTryOn(avatar.avatar_id).then(sync));
        return img;
      }),
    );
  });

  return vm;
}
