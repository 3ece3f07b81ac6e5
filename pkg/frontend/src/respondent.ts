// Respondent flow: one question on screen, three buttons, no way back.
// Each click commits an answer (keyed by its index so a retried request
// cannot be applied twice) and renders whatever the server says next.

import { ApiRequestError, SessionApi } from "./api.js";
import type { Answer, QuestionPayload, SessionPayload } from "./api.js";
import {
    DEFAULT_FRAMING,
    renderQuestion,
    renderResult,
    renderRetryBanner,
    type StudyFraming,
} from "./views.js";

export class RespondentFlow {
    private session: SessionPayload | null = null;
    private question: QuestionPayload | null = null;
    private pending: { answer: Answer; index: number } | null = null;
    private busy = false;

    constructor(
        private readonly root: HTMLElement,
        private readonly api: SessionApi,
        private readonly sessionId: string,
        private readonly framing: StudyFraming = DEFAULT_FRAMING,
    ) {}

    async start(): Promise<void> {
        try {
            const data = await this.api.getSession(this.sessionId);
            this.session = data.session;
            this.question = data.question ?? null;
        } catch (err) {
            this.showError(err, () => this.start());
            return;
        }
        this.render();
    }

    private render(): void {
        const session = this.session;
        if (!session) return;
        if (session.status !== "active" || !this.question) {
            this.root.innerHTML = renderResult(session);
            return;
        }
        this.root.innerHTML = renderQuestion(this.question, session, this.framing);
        for (const button of this.root.querySelectorAll<HTMLButtonElement>("button[data-answer]")) {
            button.addEventListener("click", () => {
                void this.answer(button.dataset.answer as Answer);
            });
        }
    }

    private setButtonsDisabled(disabled: boolean): void {
        for (const button of this.root.querySelectorAll<HTMLButtonElement>("button[data-answer]")) {
            button.disabled = disabled;
        }
    }

    async answer(answer: Answer): Promise<void> {
        if (this.busy || !this.session) return;
        // the index pins this answer to the question it was given for
        this.pending = { answer, index: this.session.questions_asked };
        await this.submitPending();
    }

    private async submitPending(): Promise<void> {
        if (!this.pending) return;
        this.busy = true;
        this.setButtonsDisabled(true);
        try {
            const data = await this.api.postAnswer(this.sessionId, this.pending.answer, this.pending.index);
            this.session = data.session;
            this.question = data.question ?? null;
            this.pending = null;
            this.render();
        } catch (err) {
            if (err instanceof ApiRequestError) {
                // a conflict means the answer was already applied or the
                // session moved on; re-sync from the server
                this.pending = null;
                await this.start();
            } else {
                this.showError(err, () => this.submitPending());
            }
        } finally {
            this.busy = false;
        }
    }

    private showError(err: unknown, retry: () => Promise<void>): void {
        const message = err instanceof Error ? err.message : String(err);
        const banner = document.createElement("div");
        banner.innerHTML = renderRetryBanner(message);
        this.root.prepend(banner);
        banner.querySelector<HTMLButtonElement>("#retry-button")?.addEventListener("click", () => {
            banner.remove();
            void retry();
        });
    }
}
