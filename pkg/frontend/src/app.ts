/**
 * Application shell: fetch the schema, then loop image tasks until the
 * queue is empty. Submissions that pass local validation go to the
 * service; a 201 advances to the next task, a 422 renders the service's
 * violations inline, and a network failure keeps the draft with a retry
 * banner. When no tasks remain, a completion screen points at the export
 * step.
 */

import { ApiClient, RejectedError } from "./api";
import { installKeyboardNavigation, refresh, renderForm } from "./form";
import { clearDraft, newFormState, FormState } from "./state";
import { Task, TaxonomySchema } from "./types";

export class App {
  readonly client: ApiClient;
  private schema: TaxonomySchema | null = null;
  private state: FormState | null = null;
  private task: Task | null = null;
  private removeKeyboard: (() => void) | null = null;

  constructor(
    private root: HTMLElement,
    base = "",
  ) {
    this.client = new ApiClient(base);
  }

  async start(): Promise<void> {
    try {
      this.schema = await this.client.taxonomy();
    } catch (err) {
      this.renderFatal(`Could not load the taxonomy schema (${String(err)}).`);
      return;
    }
    await this.advance();
  }

  /** Pull the next task and rebuild the page for it. */
  async advance(): Promise<void> {
    try {
      this.task = await this.client.nextTask();
    } catch (err) {
      this.renderFatal(`Could not fetch the next task (${String(err)}).`);
      return;
    }
    if (this.task === null) {
      await this.renderDone();
      return;
    }
    this.state = newFormState(this.schema!, this.task.image_id);
    this.renderTask();
  }

  private renderFatal(message: string): void {
    this.root.textContent = "";
    const box = document.createElement("div");
    box.id = "fatal-error";
    const text = document.createElement("p");
    text.textContent = message;
    box.appendChild(text);
    const retry = document.createElement("button");
    retry.id = "retry-start";
    retry.textContent = "Retry";
    retry.addEventListener("click", () => void this.start());
    box.appendChild(retry);
    this.root.appendChild(box);
  }

  private async renderDone(): Promise<void> {
    this.root.textContent = "";
    const box = document.createElement("div");
    box.id = "all-done";
    const heading = document.createElement("h1");
    heading.textContent = "All images annotated";
    box.appendChild(heading);
    try {
      const progress = await this.client.progress();
      const stats = document.createElement("p");
      stats.id = "progress-final";
      stats.textContent = `${progress.done} of ${progress.total} images done.`;
      box.appendChild(stats);
    } catch {
      // progress is decorative here
    }
    const hint = document.createElement("p");
    hint.textContent =
      "Export the store as a training-ready library with: " +
      "python3 -c \"from hairmony.service import export_store; " +
      "export_store('store.jsonl', 'annotations.jsonl')\"";
    box.appendChild(hint);
    this.root.appendChild(box);
  }

  private renderTask(): void {
    const schema = this.schema!;
    const state = this.state!;
    this.root.textContent = "";

    const header = document.createElement("header");
    const title = document.createElement("h1");
    title.id = "image-title";
    title.textContent = `Annotate ${this.task!.image_id}`;
    header.appendChild(title);
    const progress = document.createElement("span");
    progress.id = "progress-live";
    header.appendChild(progress);
    void this.client.progress().then((p) => {
      progress.textContent = `${p.done}/${p.total} done`;
    }).catch(() => undefined);
    this.root.appendChild(header);

    const image = document.createElement("img");
    image.id = "task-image";
    image.src = this.client.imageUrl(this.task!);
    image.alt = this.task!.image_id;
    this.root.appendChild(image);

    const banner = document.createElement("div");
    banner.id = "banner";
    this.root.appendChild(banner);

    const formHost = document.createElement("div");
    formHost.id = "form-host";
    this.root.appendChild(formHost);

    const callbacks = { onSubmit: () => void this.submit(banner) };
    this.removeKeyboard?.();
    this.removeKeyboard = installKeyboardNavigation(
      formHost,
      schema,
      state,
      callbacks,
    );
    refresh(formHost, schema, state, callbacks);
  }

  /** Local rules gate the wire: nothing invalid ever leaves the client. */
  async submit(banner: HTMLElement): Promise<void> {
    const schema = this.schema!;
    const state = this.state!;
    const formHost = this.root.querySelector<HTMLElement>("#form-host")!;
    const callbacks = { onSubmit: () => void this.submit(banner) };

    refresh(formHost, schema, state, callbacks);
    if (state.violations.length > 0) return;

    state.submitting = true;
    renderForm(formHost, schema, state, callbacks);
    try {
      await this.client.submit(state.imageId, {
        ...state.annotation,
        style_id: state.imageId,
      });
    } catch (err) {
      state.submitting = false;
      if (err instanceof RejectedError) {
        state.violations = err.violations;
        renderForm(formHost, schema, state, callbacks);
        banner.textContent = "The service rejected the annotation; see the marked fields.";
        banner.className = "error";
        return;
      }
      banner.textContent = `Submission failed (${String(err)}); your work is saved locally. Retry when the connection is back.`;
      banner.className = "error";
      renderForm(formHost, schema, state, callbacks);
      return;
    }
    clearDraft(state.imageId);
    banner.textContent = "";
    await this.advance();
  }
}

export function mount(root: HTMLElement, base = ""): App {
  const app = new App(root, base);
  void app.start();
  return app;
}
