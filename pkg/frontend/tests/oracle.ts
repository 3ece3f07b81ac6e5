// Scripted respondent: values an intervention the way a planner mixing
// quality-weighted and productivity-weighted years would, and answers by
// comparison. Mirrors the backend's simulation oracle.
import type { Answer, InterventionPayload, QuestionPayload } from "../src/api.js";

export interface Truth {
    sigma: number;
    weights: Record<string, number>; // health state -> quality weight
}

export function interventionValue(truth: Truth, side: InterventionPayload): number {
    const q = truth.weights[side.health_state];
    if (q === undefined) throw new Error(`truth has no weight for ${side.health_state}`);
    const perPerson = truth.sigma * q + (1 - truth.sigma) * side.productivity;
    return side.count * perPerson * side.duration_years;
}

export function oracleAnswer(truth: Truth, question: QuestionPayload): Answer {
    const a = interventionValue(truth, question.left);
    const b = interventionValue(truth, question.right);
    const scale = Math.max(Math.abs(a), Math.abs(b), 1e-300);
    if (Math.abs(a - b) <= 1e-12 * scale) return "indifferent";
    return a > b ? "prefer_a" : "prefer_b";
}
