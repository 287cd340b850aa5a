// Runtime control panel: personalize policy and style without a reload,
// inspect scores, clear history, export the log.

import { POLICY_NAMES, STYLE_CHOICES } from "./types.js";

export interface PanelController {
  currentPolicy(): string;
  currentStyle(): string[];
  setPolicy(name: string): void;
  setStyle(names: string[], topN: number | "auto"): void;
  clearHistory(): void;
  exportLog(): void;
  toggleOverlay(on: boolean): void;
  eventCount(): number;
}

export class Panel {
  readonly root: Element;
  private policySelect: HTMLSelectElement;
  private styleSelect: HTMLSelectElement;
  private nSlider: HTMLInputElement;
  private nAuto: HTMLInputElement;
  private nValue: Element;
  private countSpan: Element;

  constructor(host: Element, private controller: PanelController) {
    const doc = host.ownerDocument;
    host.innerHTML = "";
    this.root = doc.createElement("div");
    this.root.className = "sam-panel";

    const policyLabel = doc.createElement("label");
    policyLabel.textContent = "Policy ";
    this.policySelect = doc.createElement("select");
    this.policySelect.className = "sam-panel-policy";
    for (const name of POLICY_NAMES) {
      const option = doc.createElement("option");
      option.value = name;
      option.textContent = name;
      this.policySelect.appendChild(option);
    }
    this.policySelect.value = controller.currentPolicy();
    this.policySelect.addEventListener("change", () => {
      controller.setPolicy(this.policySelect.value);
    });
    policyLabel.appendChild(this.policySelect);

    const styleLabel = doc.createElement("label");
    styleLabel.textContent = "Style ";
    this.styleSelect = doc.createElement("select");
    this.styleSelect.className = "sam-panel-style";
    STYLE_CHOICES.forEach((names, index) => {
      const option = doc.createElement("option");
      option.value = String(index);
      option.textContent = names.join(" + ");
      this.styleSelect.appendChild(option);
    });
    const current = controller.currentStyle().join(" + ");
    const currentIndex = STYLE_CHOICES.findIndex((c) => c.join(" + ") === current);
    this.styleSelect.value = String(currentIndex >= 0 ? currentIndex : 0);
    this.styleSelect.addEventListener("change", () => this.pushStyle());
    styleLabel.appendChild(this.styleSelect);

    const nLabel = doc.createElement("label");
    nLabel.textContent = "N ";
    this.nSlider = doc.createElement("input");
    this.nSlider.type = "range";
    this.nSlider.className = "sam-panel-n";
    this.nSlider.min = "1";
    this.nSlider.max = "10";
    this.nSlider.value = "3";
    this.nSlider.addEventListener("change", () => this.pushStyle());
    this.nSlider.addEventListener("input", () => this.showN());
    this.nValue = doc.createElement("span");
    this.nValue.className = "sam-panel-n-value";
    this.nAuto = doc.createElement("input");
    this.nAuto.type = "checkbox";
    this.nAuto.className = "sam-panel-auto";
    this.nAuto.checked = true;
    this.nAuto.addEventListener("change", () => this.pushStyle());
    const autoLabel = doc.createElement("label");
    autoLabel.textContent = " auto ";
    autoLabel.appendChild(this.nAuto);
    nLabel.appendChild(this.nSlider);
    nLabel.appendChild(this.nValue);
    nLabel.appendChild(autoLabel);

    const overlayLabel = doc.createElement("label");
    overlayLabel.textContent = " scores ";
    const overlay = doc.createElement("input");
    overlay.type = "checkbox";
    overlay.className = "sam-panel-overlay";
    overlay.addEventListener("change", () => controller.toggleOverlay(overlay.checked));
    overlayLabel.appendChild(overlay);

    const clear = doc.createElement("button");
    clear.className = "sam-panel-clear";
    clear.textContent = "Clear history";
    clear.addEventListener("click", () => {
      controller.clearHistory();
      this.refresh();
    });

    const exportButton = doc.createElement("button");
    exportButton.className = "sam-panel-export";
    exportButton.textContent = "Export log";
    exportButton.addEventListener("click", () => controller.exportLog());

    this.countSpan = doc.createElement("span");
    this.countSpan.className = "sam-panel-count";

    for (const child of [
      policyLabel,
      styleLabel,
      nLabel,
      overlayLabel,
      clear,
      exportButton,
      this.countSpan,
    ]) {
      this.root.appendChild(child);
    }
    host.appendChild(this.root);
    this.showN();
    this.refresh();
  }

  private clampedN(): number {
    // slider bounds are the contract; clamp defensively for programmatic sets
    const raw = parseInt(this.nSlider.value, 10);
    return Math.min(Math.max(Number.isNaN(raw) ? 3 : raw, 1), 10);
  }

  private showN(): void {
    this.nValue.textContent = String(this.clampedN());
  }

  private pushStyle(): void {
    const names = STYLE_CHOICES[parseInt(this.styleSelect.value, 10)] ?? STYLE_CHOICES[0];
    this.controller.setStyle([...names], this.nAuto.checked ? "auto" : this.clampedN());
  }

  refresh(): void {
    this.countSpan.textContent = `${this.controller.eventCount()} events logged`;
  }
}
