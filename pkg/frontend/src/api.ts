/**
 * Thin client over the topicmesh REST API.
 *
 * At most one view request is in flight: starting a new one aborts the
 * previous, so a fast sequence of filter changes settles on the last
 * request's response.
 */

import type {
  LevelsJson,
  ModelJson,
  UploadResponseJson,
  ViewReportJson,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function errorDetail(response: Response): Promise<string> {
  const text = await response.text();
  try {
    const parsed = JSON.parse(text) as { detail?: unknown };
    if (typeof parsed.detail === "string") return parsed.detail;
  } catch {
    // not JSON; fall through to the raw body
  }
  return text || `HTTP ${response.status}`;
}

export class ApiClient {
  private viewAbort: AbortController | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async checked(response: Response): Promise<Response> {
    if (!response.ok) throw new ApiError(response.status, await errorDetail(response));
    return response;
  }

  async postDataset(sqa: string, qt: string): Promise<UploadResponseJson> {
    const response = await this.fetchFn(`${this.baseUrl}/datasets`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ sqa, qt }),
    });
    return (await (await this.checked(response)).json()) as UploadResponseJson;
  }

  async getModel(datasetId: string): Promise<ModelJson> {
    const response = await this.fetchFn(`${this.baseUrl}/datasets/${datasetId}/model`);
    return (await (await this.checked(response)).json()) as ModelJson;
  }

  async getLevels(datasetId: string): Promise<LevelsJson> {
    const response = await this.fetchFn(`${this.baseUrl}/datasets/${datasetId}/levels`);
    return (await (await this.checked(response)).json()) as LevelsJson;
  }

  viewUrl(
    datasetId: string,
    filter: URLSearchParams,
    format: "svg" | "json" | "dot" = "svg",
  ): string {
    const params = new URLSearchParams(filter);
    params.set("format", format);
    return `${this.baseUrl}/datasets/${datasetId}/view?${params.toString()}`;
  }

  /** Fetch the rendered SVG and its JSON report together, superseding any
   * still-running view request. */
  async getView(
    datasetId: string,
    filter: URLSearchParams,
  ): Promise<{ svg: string; report: ViewReportJson }> {
    this.viewAbort?.abort();
    const controller = new AbortController();
    this.viewAbort = controller;
    const init = { signal: controller.signal };
    const [svgResponse, reportResponse] = await Promise.all([
      this.fetchFn(this.viewUrl(datasetId, filter, "svg"), init),
      this.fetchFn(this.viewUrl(datasetId, filter, "json"), init),
    ]);
    const svg = await (await this.checked(svgResponse)).text();
    const report = (await (await this.checked(reportResponse)).json()) as ViewReportJson;
    return { svg, report };
  }
}
