// Hash-routed entry point: #/dashboard (default) for analysts,
// #/session/<id> for a respondent answering one interview.

import { SessionApi } from "./api.js";
import { Dashboard } from "./dashboard.js";
import { RespondentFlow } from "./respondent.js";

const DEFAULT_API = "http://127.0.0.1:8710";

function apiBase(): string {
    const meta = document.querySelector<HTMLMetaElement>('meta[name="api-base"]');
    return meta?.content || DEFAULT_API;
}

let activeDashboard: Dashboard | null = null;

async function route(): Promise<void> {
    const root = document.getElementById("app");
    if (!root) return;
    activeDashboard?.stop();
    activeDashboard = null;

    const api = new SessionApi(apiBase());
    const hash = window.location.hash;
    const sessionMatch = /^#\/session\/(.+)$/.exec(hash);
    if (sessionMatch) {
        const flow = new RespondentFlow(root, api, sessionMatch[1]);
        await flow.start();
        return;
    }
    activeDashboard = new Dashboard(root, api);
    await activeDashboard.start();
}

window.addEventListener("hashchange", () => void route());
window.addEventListener("DOMContentLoaded", () => void route());
