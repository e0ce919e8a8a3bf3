/** Input-configuration form: operation, datasets selected by [IP, window]
 * tuples, feature spec and parameters.
 *
 * The form enforces operation arity (two datasets for discriminant and
 * anomaly, one for clustering), populates the attribute picker from the
 * schema endpoint, and renders server-side validation violations inline
 * next to the section they concern. */

import type { ApiClient } from "../api.js";
import { ApiError } from "../api.js";
import { clear, el } from "../dom.js";
import type {
  ConfigDoc,
  DatasetDoc,
  FeaturesDoc,
  OperationName,
  SourceName,
  TupleDoc,
} from "../types.js";

interface TupleDraft {
  ip_pattern: string;
  start: string;
  end: string;
}

interface DatasetDraft {
  source: SourceName;
  tuples: TupleDraft[];
  mode: FeaturesDoc["mode"];
  fields: string[];
  unit: "bytes" | "flows";
  granularity: FeaturesDoc["granularity"];
  top_n: number;
}

export interface ConfigureHandlers {
  onSubmitted(jobId: string): void;
}

const TWO_SET_OPERATIONS: OperationName[] = ["discriminant", "anomaly"];

function emptyDataset(): DatasetDraft {
  return {
    source: "hostlog",
    tuples: [{ ip_pattern: "", start: "", end: "" }],
    mode: "value-count",
    fields: [],
    unit: "bytes",
    granularity: "per-entity",
    top_n: 2048,
  };
}

function datasetToDoc(draft: DatasetDraft): DatasetDoc {
  const tuples: TupleDoc[] = draft.tuples
    .filter((t) => t.ip_pattern.trim() !== "")
    .map((t) => ({
      ip_pattern: t.ip_pattern.trim(),
      window: { start: t.start.trim(), end: t.end.trim() },
    }));
  const usesFields = draft.mode === "value-count" || draft.mode === "field-sum";
  return {
    selector: { source: draft.source, tuples },
    features: {
      mode: draft.mode,
      fields: usesFields ? draft.fields : [],
      unit: draft.mode === "port-direction-percent" ? draft.unit : null,
      granularity: draft.granularity,
      top_n: draft.top_n,
    },
  };
}

export class ConfigureView {
  readonly root: HTMLElement;
  private operation: OperationName = "discriminant";
  private datasetA = emptyDataset();
  private datasetB = emptyDataset();
  private k: string = "";
  private minClusterSize = 5;
  private regularization = 1e-6;
  private errors = new Map<string, string>();
  private schemaCache = new Map<SourceName, string[]>();

  constructor(
    private readonly api: ApiClient,
    private readonly handlers: ConfigureHandlers,
  ) {
    this.root = el("form", { class: "panel configure" });
    (this.root as HTMLFormElement).addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    void this.render();
  }

  get isTwoSet(): boolean {
    return TWO_SET_OPERATIONS.includes(this.operation);
  }

  private async fieldChoices(source: SourceName): Promise<string[]> {
    const cached = this.schemaCache.get(source);
    if (cached) return cached;
    try {
      const schema = await this.api.schema(source);
      this.schemaCache.set(source, schema.fields);
      return schema.fields;
    } catch {
      return [];
    }
  }

  buildConfig(): ConfigDoc {
    return {
      operation: this.operation,
      dataset_a: datasetToDoc(this.datasetA),
      dataset_b: this.isTwoSet ? datasetToDoc(this.datasetB) : null,
      params: {
        k: this.k.trim() === "" ? null : Number(this.k),
        min_cluster_size: this.minClusterSize,
        regularization: this.regularization,
      },
    };
  }

  /** Client-side checks that mirror the server's hard requirements. */
  localViolations(): Map<string, string> {
    const errors = new Map<string, string>();
    const checkTuples = (key: string, draft: DatasetDraft) => {
      const doc = datasetToDoc(draft);
      if (doc.selector.tuples.length === 0) {
        errors.set(key, "tuples non-empty: add at least one [IP, window] tuple");
      }
    };
    checkTuples("dataset_a", this.datasetA);
    if (this.isTwoSet) checkTuples("dataset_b", this.datasetB);
    return errors;
  }

  private placeViolation(message: string): void {
    if (message.includes("dataset_b")) this.errors.set("dataset_b", message);
    else if (/\b(k|min_cluster_size|regularization)\b/.test(message)) {
      this.errors.set("params", message);
    } else this.errors.set("form", message);
  }

  async submit(): Promise<void> {
    this.errors = this.localViolations();
    if (this.errors.size > 0) {
      await this.render();
      return;
    }
    try {
      const response = await this.api.submitJob(this.buildConfig());
      this.handlers.onSubmitted(response.job_id);
    } catch (error) {
      this.errors = new Map();
      if (error instanceof ApiError && error.violations.length > 0) {
        for (const violation of error.violations) this.placeViolation(violation);
      } else {
        this.errors.set("form", String(error instanceof Error ? error.message : error));
      }
      await this.render();
    }
  }

  private errorLine(key: string): HTMLElement | null {
    const message = this.errors.get(key);
    if (!message) return null;
    return el("p", { class: "field-error", "data-error-for": key }, message);
  }

  private tupleEditor(key: string, draft: DatasetDraft): HTMLElement {
    const box = el("div", {});
    draft.tuples.forEach((tuple, i) => {
      const row = el("div", { class: "tuple-row" });
      const ip = el("input", {
        placeholder: "IP or CIDR",
        value: tuple.ip_pattern,
        "data-tuple": `${key}-ip-${i}`,
      }) as HTMLInputElement;
      ip.addEventListener("input", () => (tuple.ip_pattern = ip.value));
      const start = el("input", {
        placeholder: "window start (ISO-8601)",
        value: tuple.start,
        "data-tuple": `${key}-start-${i}`,
      }) as HTMLInputElement;
      start.addEventListener("input", () => (tuple.start = start.value));
      const end = el("input", {
        placeholder: "window end (ISO-8601)",
        value: tuple.end,
        "data-tuple": `${key}-end-${i}`,
      }) as HTMLInputElement;
      end.addEventListener("input", () => (tuple.end = end.value));
      const remove = el(
        "button",
        {
          class: "ghost",
          type: "button",
          onclick: () => {
            draft.tuples.splice(i, 1);
            void this.render();
          },
        },
        "remove",
      );
      row.append(ip, start, end, remove);
      box.append(row);
    });
    box.append(
      el(
        "button",
        {
          class: "ghost",
          type: "button",
          "data-action": `${key}-add-tuple`,
          onclick: () => {
            draft.tuples.push({ ip_pattern: "", start: "", end: "" });
            void this.render();
          },
        },
        "add tuple",
      ),
    );
    return box;
  }

  private async datasetSection(
    key: "dataset_a" | "dataset_b",
    title: string,
    draft: DatasetDraft,
  ): Promise<HTMLElement> {
    const section = el("section", { class: "dataset-section", "data-section": key });
    section.append(el("h3", {}, title));

    const sourceSelect = el("select", { "data-input": `${key}-source` }) as HTMLSelectElement;
    for (const source of ["hostlog", "flow"] as SourceName[]) {
      sourceSelect.append(el("option", { value: source }, source));
    }
    sourceSelect.value = draft.source;
    sourceSelect.addEventListener("change", () => {
      draft.source = sourceSelect.value as SourceName;
      draft.fields = [];
      void this.render();
    });
    section.append(el("label", {}, "data source"), sourceSelect);

    section.append(el("label", {}, "[IP, time-window] tuples"), this.tupleEditor(key, draft));
    const tupleError = this.errorLine(key);
    if (tupleError) section.append(tupleError);

    const modeSelect = el("select", { "data-input": `${key}-mode` }) as HTMLSelectElement;
    const modes: FeaturesDoc["mode"][] =
      draft.source === "flow"
        ? ["value-count", "field-sum", "port-direction-percent", "contact-count"]
        : ["value-count", "field-sum"];
    for (const mode of modes) modeSelect.append(el("option", { value: mode }, mode));
    if (!modes.includes(draft.mode)) draft.mode = "value-count";
    modeSelect.value = draft.mode;
    modeSelect.addEventListener("change", () => {
      draft.mode = modeSelect.value as FeaturesDoc["mode"];
      void this.render();
    });
    section.append(el("label", {}, "attributes"), modeSelect);

    if (draft.mode === "value-count" || draft.mode === "field-sum") {
      const picker = el("select", {
        multiple: "",
        "data-input": `${key}-fields`,
        size: "4",
      }) as HTMLSelectElement;
      for (const field of await this.fieldChoices(draft.source)) {
        const option = el("option", { value: field }, field) as HTMLOptionElement;
        option.selected = draft.fields.includes(field);
        picker.append(option);
      }
      picker.addEventListener("change", () => {
        draft.fields = [...picker.selectedOptions].map((o) => o.value);
      });
      section.append(el("label", {}, "fields (from observed schema)"), picker);
    }
    if (draft.mode === "port-direction-percent") {
      const unitSelect = el("select", { "data-input": `${key}-unit` }) as HTMLSelectElement;
      for (const unit of ["bytes", "flows"]) unitSelect.append(el("option", { value: unit }, unit));
      unitSelect.value = draft.unit;
      unitSelect.addEventListener("change", () => (draft.unit = unitSelect.value as "bytes" | "flows"));
      section.append(el("label", {}, "unit"), unitSelect);
    }

    const granularity = el("select", { "data-input": `${key}-granularity` }) as HTMLSelectElement;
    for (const g of ["per-entity", "per-record"]) granularity.append(el("option", { value: g }, g));
    granularity.value = draft.granularity;
    granularity.addEventListener(
      "change",
      () => (draft.granularity = granularity.value as FeaturesDoc["granularity"]),
    );
    section.append(el("label", {}, "granularity"), granularity);
    return section;
  }

  async render(): Promise<void> {
    clear(this.root);
    this.root.append(el("h2", {}, "Configure an operation"));
    const formError = this.errorLine("form");
    if (formError) this.root.append(formError);

    const operationSelect = el("select", { "data-input": "operation" }) as HTMLSelectElement;
    for (const op of ["discriminant", "anomaly", "clustering"] as OperationName[]) {
      operationSelect.append(el("option", { value: op }, op));
    }
    operationSelect.value = this.operation;
    operationSelect.addEventListener("change", () => {
      this.operation = operationSelect.value as OperationName;
      void this.render();
    });
    this.root.append(el("label", {}, "operation"), operationSelect);

    const labelA = this.operation === "anomaly" ? "Baseline dataset" : "Dataset A";
    this.root.append(await this.datasetSection("dataset_a", labelA, this.datasetA));
    if (this.isTwoSet) {
      const labelB = this.operation === "anomaly" ? "Test dataset" : "Dataset B";
      this.root.append(await this.datasetSection("dataset_b", labelB, this.datasetB));
    }

    const params = el("section", { class: "dataset-section", "data-section": "params" });
    params.append(el("h3", {}, "Parameters"));
    const kInput = el("input", { "data-input": "k", value: this.k, placeholder: "default" }) as HTMLInputElement;
    kInput.addEventListener("input", () => (this.k = kInput.value));
    params.append(el("label", {}, "neighbors (k)"), kInput);
    const mcsInput = el("input", {
      "data-input": "min_cluster_size",
      value: String(this.minClusterSize),
    }) as HTMLInputElement;
    mcsInput.addEventListener("input", () => (this.minClusterSize = Number(mcsInput.value)));
    params.append(el("label", {}, "min cluster size"), mcsInput);
    const regInput = el("input", {
      "data-input": "regularization",
      value: String(this.regularization),
    }) as HTMLInputElement;
    regInput.addEventListener("input", () => (this.regularization = Number(regInput.value)));
    params.append(el("label", {}, "regularization"), regInput);
    const paramsError = this.errorLine("params");
    if (paramsError) params.append(paramsError);
    this.root.append(params);

    this.root.append(el("button", { class: "primary", type: "submit" }, "run operation"));
  }
}
