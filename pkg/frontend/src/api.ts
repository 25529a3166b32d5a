/** Thin typed client for the annotation service REST API. */

import { Annotation, Progress, Task, TaxonomySchema, Violation } from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export class RejectedError extends ApiError {
  constructor(public violations: Violation[]) {
    super(422, "annotation rejected");
  }
}

export class ApiClient {
  constructor(
    private base: string = "",
    private annotatorId: string = "anonymous",
  ) {}

  setAnnotator(id: string): void {
    this.annotatorId = id;
  }

  async taxonomy(): Promise<TaxonomySchema> {
    const resp = await fetch(`${this.base}/api/taxonomy`);
    if (!resp.ok) throw new ApiError(resp.status, "failed to fetch taxonomy");
    return (await resp.json()) as TaxonomySchema;
  }

  /** Next pending image, or null when everything is annotated. */
  async nextTask(): Promise<Task | null> {
    const resp = await fetch(`${this.base}/api/tasks/next`);
    if (resp.status === 204) return null;
    if (!resp.ok) throw new ApiError(resp.status, "failed to fetch next task");
    return (await resp.json()) as Task;
  }

  async progress(): Promise<Progress> {
    const resp = await fetch(`${this.base}/api/progress`);
    if (!resp.ok) throw new ApiError(resp.status, "failed to fetch progress");
    return (await resp.json()) as Progress;
  }

  /** Resolves on 201; throws RejectedError carrying the 422 violation list. */
  async submit(imageId: string, annotation: Annotation): Promise<void> {
    const resp = await fetch(`${this.base}/api/annotations`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        image_id: imageId,
        annotator_id: this.annotatorId,
        annotation,
      }),
    });
    if (resp.status === 201) return;
    if (resp.status === 422) {
      const body = (await resp.json()) as { violations: Violation[] };
      throw new RejectedError(body.violations);
    }
    throw new ApiError(resp.status, `submission failed (${resp.status})`);
  }

  imageUrl(task: Task): string {
    return `${this.base}${task.image_url}`;
  }
}
