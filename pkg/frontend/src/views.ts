// Pure renderers: every view is a plain function of API payloads, so the
// markup can be asserted in tests without a server. No estimate or
// aggregate is ever computed here; values are formatted as received.

import type {
    AggregatePayload,
    EstimatePayload,
    InterventionPayload,
    QuestionPayload,
    SessionListPayload,
    SessionPayload,
} from "./api.js";

export interface StudyFraming {
    // study-configurable wording for what a year of lifetime means to
    // respondents; no default interpretation is claimed
    timeLabel: string;
}

export const DEFAULT_FRAMING: StudyFraming = { timeLabel: "year(s) gained" };

export function escapeHtml(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

export function productivityText(p: number): string {
    if (p === 0) return "not able to work";
    if (p === 1) return "fully able to work";
    return `able to work at ${Math.round(p * 100)}% of full capacity`;
}

export function formatCount(count: number): string {
    const rounded = Math.round(count);
    return rounded.toString().replace(/\B(?=(\d{3})+(?!\d))/g, ",");
}

export function formatPeople(count: number): string {
    const rounded = Math.round(count);
    return `${formatCount(count)} ${rounded === 1 ? "person" : "people"}`;
}

export function formatDuration(years: number, framing: StudyFraming): string {
    const text = Number.isInteger(years) ? years.toString() : years.toFixed(3);
    return `${text} ${framing.timeLabel}`;
}

export function formatEstimate(value: number): string {
    return value.toFixed(4);
}

function interventionCard(
    title: string,
    side: InterventionPayload,
    highlight: "count" | "duration_years" | null,
    framing: StudyFraming,
): string {
    const people =
        highlight === "count"
            ? `<strong class="adjustable">${formatPeople(side.count)}</strong>`
            : formatPeople(side.count);
    const duration =
        highlight === "duration_years"
            ? `<strong class="adjustable">${formatDuration(side.duration_years, framing)}</strong>`
            : formatDuration(side.duration_years, framing);
    return `<div class="card">
  <h3>${escapeHtml(title)}</h3>
  <p>${people} in health state <em>${escapeHtml(side.health_state)}</em>,</p>
  <p>${escapeHtml(productivityText(side.productivity))},</p>
  <p>each obtaining ${duration}.</p>
</div>`;
}

export function renderQuestion(
    question: QuestionPayload,
    session: SessionPayload,
    framing: StudyFraming = DEFAULT_FRAMING,
): string {
    const [lo, hi] = session.bracket;
    return `<section class="question">
<h2>Which intervention is more desirable for society?</h2>
<div class="cards">
${interventionCard("Intervention A", question.left, null, framing)}
${interventionCard("Intervention B", question.right, question.adjustable, framing)}
</div>
<div class="controls">
<button id="answer-a" data-answer="prefer_a">Prefer A</button>
<button id="answer-indifferent" data-answer="indifferent">Can't decide</button>
<button id="answer-b" data-answer="prefer_b">Prefer B</button>
</div>
<p class="progress">Questions answered: ${session.questions_asked}. Search bracket: [${session.bracket[0].toFixed(3)}, ${session.bracket[1].toFixed(3)}], width ${(hi - lo).toFixed(3)}.</p>
</section>`;
}

const PARAMETER_LABELS: Record<EstimatePayload["parameter"], string> = {
    quality_weight: "quality weight",
    mixing_weight: "health vs productivity weight",
};

export function renderResult(session: SessionPayload): string {
    if (session.status === "inconsistent") {
        return `<section class="result inconsistent">
<h2>Session could not converge</h2>
<p>${escapeHtml(session.inconsistency ?? "answers were mutually inconsistent")}</p>
</section>`;
    }
    const est = session.estimate;
    if (!est) {
        return `<section class="result"><h2>Session finished</h2><p>No estimate is available.</p></section>`;
    }
    const clampNote = est.clamped ? `<p class="note">The raw value fell outside [0, 1] and was clamped.</p>` : "";
    return `<section class="result">
<h2>Thank you!</h2>
<p>Estimated ${PARAMETER_LABELS[est.parameter]} for <em>${escapeHtml(session.health_state)}</em>:</p>
<p class="estimate" id="estimate-value">${formatEstimate(est.value)}</p>
${clampNote}
<p class="note">Based on ${session.questions_asked} answered question(s).</p>
</section>`;
}

export function renderRetryBanner(message: string): string {
    return `<div class="banner error" id="retry-banner">
<p>Could not reach the study server: ${escapeHtml(message)}</p>
<button id="retry-button">Try again</button>
</div>`;
}

function aggregateText(agg: AggregatePayload | null): string {
    if (!agg) return "no converged sessions yet";
    return `median ${formatEstimate(agg.median)}, IQR ${formatEstimate(agg.iqr)} (n=${agg.n})`;
}

export function statusBadge(session: SessionPayload): string {
    return `<span class="status ${session.status}">${session.status}</span>`;
}

export function renderDashboard(listing: SessionListPayload): string {
    const rows = listing.sessions
        .map((s) => {
            const estimate = s.estimate ? formatEstimate(s.estimate.value) : "–";
            return `<tr data-id="${escapeHtml(s.id)}">
<td class="session-id"><a href="#/session/${escapeHtml(s.id)}">${escapeHtml(s.id.slice(0, 8))}</a></td>
<td>${escapeHtml(s.kind)}</td>
<td>${escapeHtml(s.health_state)}</td>
<td>${statusBadge(s)}</td>
<td class="estimate-cell">${estimate}</td>
<td>${escapeHtml(s.respondent ?? "–")}</td>
</tr>`;
        })
        .join("\n");
    const table =
        listing.sessions.length === 0
            ? `<p class="empty" id="empty-state">No sessions yet. Create one below.</p>`
            : `<table id="session-table">
<thead><tr><th>id</th><th>kind</th><th>state</th><th>status</th><th>estimate</th><th>respondent</th></tr></thead>
<tbody>${rows}</tbody>
</table>`;
    return `<section class="dashboard">
<h2>Sessions</h2>
${table}
<div class="aggregates">
<p id="aggregate-quality">Quality weight: ${aggregateText(listing.aggregates.quality)}</p>
<p id="aggregate-sigma">Mixing weight: ${aggregateText(listing.aggregates.sigma)}</p>
</div>
</section>`;
}

export function renderCreateForm(): string {
    return `<section class="create">
<h2>New session</h2>
<form id="create-form">
<label>Kind
<select id="create-kind">
<option value="quality">quality weight</option>
<option value="sigma">mixing weight</option>
</select></label>
<label>Health state <input id="create-state" value="impaired"></label>
<label>Bracket low <input id="create-lo" type="number" step="any" value="1000"></label>
<label>Bracket high <input id="create-hi" type="number" step="any" value="64000"></label>
<label class="sigma-only">Quality weight q <input id="create-qa" type="number" step="any" value="0.5"></label>
<label>Respondent <input id="create-respondent" placeholder="optional"></label>
<button type="submit" id="create-submit">Create</button>
<p class="form-error" id="create-error" hidden></p>
</form>
</section>`;
}
