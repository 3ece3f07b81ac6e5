// End-to-end respondent flow against the real session service: a scripted
// respondent clicks through a quality interview and the result screen must
// show the estimate the API computed.
import { beforeEach, describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { RespondentFlow } from "../src/respondent.js";
import { API_BASE } from "./config.js";
import { oracleAnswer, type Truth } from "./oracle.js";

const api = new SessionApi(API_BASE);

async function waitFor(predicate: () => boolean, timeoutMs = 10_000): Promise<void> {
    const deadline = Date.now() + timeoutMs;
    while (Date.now() < deadline) {
        if (predicate()) return;
        await new Promise((r) => setTimeout(r, 10));
    }
    throw new Error("condition not reached in time");
}

function mount(): HTMLElement {
    document.body.innerHTML = `<main id="app"></main>`;
    return document.getElementById("app") as HTMLElement;
}

describe("respondent flow", () => {
    beforeEach(() => {
        document.body.innerHTML = "";
    });

    it("completes a quality interview and shows the API's estimate", async () => {
        const truth: Truth = { sigma: 0.5, weights: { full_health: 1.0, impaired: 0.25 } };
        const created = await api.createSession({
            kind: "quality",
            state: "impaired",
            bracket: [1000, 64000],
            tolerance: 1e-3,
        });
        const root = mount();
        const flow = new RespondentFlow(root, api, created.id);
        await flow.start();

        for (let step = 0; step < 40; step += 1) {
            const buttons = root.querySelectorAll<HTMLButtonElement>("button[data-answer]");
            if (buttons.length === 0) break; // result screen reached
            const state = await api.getSession(created.id);
            if (!state.question) break;
            const answer = oracleAnswer(truth, state.question);
            const button = root.querySelector<HTMLButtonElement>(`button[data-answer="${answer}"]`);
            expect(button).not.toBeNull();
            const asked = state.session.questions_asked;
            button!.click();
            await waitFor(() => {
                const done = root.querySelector("#estimate-value") !== null;
                const progressed = root.innerHTML.includes(`Questions answered: ${asked + 1}`);
                return done || progressed;
            });
        }

        const estimateText = root.querySelector("#estimate-value")?.textContent;
        expect(estimateText).toBeTruthy();
        const shown = Number(estimateText);
        expect(Math.abs(shown - 0.25)).toBeLessThan(1e-2);

        // the displayed number is exactly what the API reports
        const fromApi = await api.getEstimate(created.id);
        expect(shown).toBeCloseTo(Number(fromApi.estimate.value.toFixed(4)), 12);
        // no answer controls remain on the result screen
        expect(root.querySelectorAll("button[data-answer]").length).toBe(0);
    });

    it("ends immediately when the respondent can't decide", async () => {
        const created = await api.createSession({
            kind: "quality",
            state: "impaired",
            bracket: [1000, 64000],
        });
        const root = mount();
        const flow = new RespondentFlow(root, api, created.id);
        await flow.start();
        root.querySelector<HTMLButtonElement>('button[data-answer="indifferent"]')!.click();
        await waitFor(() => root.querySelector("#estimate-value") !== null);
        // indifference at the first question (x = 8000) implies 1000/8000
        expect(root.querySelector("#estimate-value")?.textContent).toBe("0.1250");
    });

    it("shows the finished screen when opening a converged session", async () => {
        const created = await api.createSession({
            kind: "quality",
            state: "impaired",
            bracket: [1000, 64000],
        });
        await api.postAnswer(created.id, "indifferent", 0);
        const root = mount();
        const flow = new RespondentFlow(root, api, created.id);
        await flow.start();
        expect(root.querySelectorAll("button[data-answer]").length).toBe(0);
        expect(root.querySelector("#estimate-value")).not.toBeNull();
    });

    it("walks a sigma interview to the mixing weight", async () => {
        const truth: Truth = { sigma: 4 / 7, weights: { full_health: 1.0, impaired: 0.5 } };
        const created = await api.createSession({
            kind: "sigma",
            state: "impaired",
            q_a: 0.5,
            bracket: [0.01, 2.0],
            tolerance: 1e-3,
        });
        const root = mount();
        const flow = new RespondentFlow(root, api, created.id);
        await flow.start();
        for (let step = 0; step < 40; step += 1) {
            if (root.querySelector("#estimate-value")) break;
            const state = await api.getSession(created.id);
            if (!state.question) break;
            const answer = oracleAnswer(truth, state.question);
            const asked = state.session.questions_asked;
            root.querySelector<HTMLButtonElement>(`button[data-answer="${answer}"]`)!.click();
            await waitFor(
                () =>
                    root.querySelector("#estimate-value") !== null ||
                    root.innerHTML.includes(`Questions answered: ${asked + 1}`),
            );
        }
        const shown = Number(root.querySelector("#estimate-value")?.textContent);
        expect(Math.abs(shown - 4 / 7)).toBeLessThan(1e-2);
    });
});
