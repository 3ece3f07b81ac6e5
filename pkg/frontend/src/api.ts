// Typed client for the elicitation session API. Every number shown in the
// UI comes out of these payloads; the client never derives estimates.

export interface InterventionPayload {
    count: number;
    health_state: string;
    productivity: number;
    duration_years: number;
}

export interface QuestionPayload {
    left: InterventionPayload;
    right: InterventionPayload;
    adjustable: "count" | "duration_years";
    current_value: number;
}

export interface EstimatePayload {
    parameter: "quality_weight" | "mixing_weight";
    value: number;
    clamped: boolean;
}

export interface SessionPayload {
    id: string;
    kind: "quality" | "sigma";
    health_state: string;
    status: "active" | "converged" | "inconsistent";
    bracket: [number, number];
    tolerance: number;
    history: [number, string][];
    questions_asked: number;
    created: string;
    updated: string;
    respondent: string | null;
    base_count?: number;
    q_a?: number;
    converged_value?: number;
    estimate?: EstimatePayload;
    inconsistency?: string;
}

export interface AggregatePayload {
    n: number;
    median: number;
    iqr: number;
}

export interface SessionListPayload {
    sessions: SessionPayload[];
    aggregates: {
        quality: AggregatePayload | null;
        sigma: AggregatePayload | null;
    };
}

export interface ApiError {
    error: string;
    message: string;
}

export type Answer = "prefer_a" | "prefer_b" | "indifferent";

export interface CreateSessionRequest {
    kind: "quality" | "sigma";
    state?: string;
    bracket?: [number, number];
    tolerance?: number;
    base_count?: number;
    q_a?: number;
    respondent?: string;
}

export class ApiRequestError extends Error {
    constructor(
        public readonly status: number,
        public readonly code: string,
        message: string,
    ) {
        super(message);
    }
}

async function parseOrThrow<T>(resp: Response): Promise<T> {
    const body = await resp.json();
    if (!resp.ok) {
        const err = body as ApiError;
        throw new ApiRequestError(resp.status, err.error ?? "unknown", err.message ?? resp.statusText);
    }
    return body as T;
}

export class SessionApi {
    constructor(private readonly baseUrl: string) {}

    async createSession(req: CreateSessionRequest): Promise<{ id: string; session: SessionPayload; question: QuestionPayload }> {
        const resp = await fetch(`${this.baseUrl}/sessions`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(req),
        });
        return parseOrThrow(resp);
    }

    async listSessions(): Promise<SessionListPayload> {
        return parseOrThrow(await fetch(`${this.baseUrl}/sessions`));
    }

    async getSession(id: string): Promise<{ session: SessionPayload; question?: QuestionPayload }> {
        return parseOrThrow(await fetch(`${this.baseUrl}/sessions/${id}`));
    }

    async getQuestion(id: string): Promise<{ question: QuestionPayload; questions_asked: number }> {
        return parseOrThrow(await fetch(`${this.baseUrl}/sessions/${id}/question`));
    }

    // `index` is the number of answers already committed; resending the
    // same (index, answer) after a network hiccup is a no-op server side
    async postAnswer(
        id: string,
        answer: Answer,
        index: number,
    ): Promise<{ session: SessionPayload; question?: QuestionPayload; replayed?: boolean }> {
        const resp = await fetch(`${this.baseUrl}/sessions/${id}/answer`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ answer, index }),
        });
        return parseOrThrow(resp);
    }

    async getEstimate(id: string): Promise<{ estimate: EstimatePayload; session: SessionPayload }> {
        return parseOrThrow(await fetch(`${this.baseUrl}/sessions/${id}/estimate`));
    }
}
