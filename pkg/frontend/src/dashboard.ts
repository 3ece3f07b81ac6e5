// Analyst dashboard: a polled read-only table of sessions plus a form
// that starts new ones. All aggregates come from the listing payload.

import { SessionApi } from "./api.js";
import type { CreateSessionRequest } from "./api.js";
import { renderCreateForm, renderDashboard, renderRetryBanner } from "./views.js";

export class Dashboard {
    private timer: ReturnType<typeof setInterval> | null = null;

    constructor(
        private readonly root: HTMLElement,
        private readonly api: SessionApi,
        private readonly pollMs = 2000,
    ) {}

    async start(): Promise<void> {
        this.root.innerHTML = `<div id="dashboard-table"></div><div id="dashboard-form"></div><div id="dashboard-banner"></div>`;
        this.mountForm();
        await this.refresh();
        this.timer = setInterval(() => void this.refresh(), this.pollMs);
    }

    stop(): void {
        if (this.timer !== null) clearInterval(this.timer);
        this.timer = null;
    }

    async refresh(): Promise<void> {
        const table = this.root.querySelector<HTMLElement>("#dashboard-table");
        const bannerHost = this.root.querySelector<HTMLElement>("#dashboard-banner");
        if (!table || !bannerHost) return;
        try {
            const listing = await this.api.listSessions();
            table.innerHTML = renderDashboard(listing);
            bannerHost.innerHTML = "";
        } catch (err) {
            const message = err instanceof Error ? err.message : String(err);
            bannerHost.innerHTML = renderRetryBanner(message);
            bannerHost.querySelector("#retry-button")?.addEventListener("click", () => void this.refresh());
        }
    }

    private mountForm(): void {
        const host = this.root.querySelector<HTMLElement>("#dashboard-form");
        if (!host) return;
        host.innerHTML = renderCreateForm();
        const form = host.querySelector<HTMLFormElement>("#create-form");
        form?.addEventListener("submit", (event) => {
            event.preventDefault();
            void this.submitForm();
        });
    }

    readForm(): { request?: CreateSessionRequest; error?: string } {
        const value = (id: string) => this.root.querySelector<HTMLInputElement>(`#${id}`)?.value ?? "";
        const kind = value("create-kind") as "quality" | "sigma";
        const lo = Number(value("create-lo"));
        const hi = Number(value("create-hi"));
        if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
            return { error: "bracket bounds must be numbers" };
        }
        if (lo >= hi) {
            return { error: "bracket low must be less than bracket high" };
        }
        const request: CreateSessionRequest = {
            kind,
            state: value("create-state") || "impaired",
            bracket: [lo, hi],
        };
        if (kind === "sigma") {
            const qa = Number(value("create-qa"));
            if (!(qa > 0 && qa <= 1)) {
                return { error: "quality weight must be in (0, 1]" };
            }
            request.q_a = qa;
        }
        const respondent = value("create-respondent");
        if (respondent) request.respondent = respondent;
        return { request };
    }

    async submitForm(): Promise<void> {
        const errorBox = this.root.querySelector<HTMLElement>("#create-error");
        const { request, error } = this.readForm();
        if (!request) {
            if (errorBox) {
                errorBox.textContent = error ?? "invalid form";
                errorBox.hidden = false;
            }
            return;
        }
        try {
            await this.api.createSession(request);
            if (errorBox) errorBox.hidden = true;
            await this.refresh();
        } catch (err) {
            if (errorBox) {
                errorBox.textContent = err instanceof Error ? err.message : String(err);
                errorBox.hidden = false;
            }
        }
    }
}
