/**
 * Flatten a stats payload into display rows, field for field.
 *
 * The panel never computes statistics itself: every value is rendered
 * straight from the service payload (the single source of truth).
 */
export function statsFields(payload) {
    const rows = [
        ["revision", String(payload.revision)],
        ["candidates", String(payload.n_candidates)],
        ["doubly labeled", String(payload.n_doubly_labeled)],
        ["kappa", payload.kappa === null ? "unavailable" : String(payload.kappa)],
        ["strict consensus", String(payload.consensus.strict)],
        ["loose consensus", String(payload.consensus.loose)],
    ];
    for (const [annotator, progress] of Object.entries(payload.annotators)) {
        rows.push([`annotator ${annotator}`, `${progress.labeled}/${progress.total}`]);
    }
    const prevalence = payload.prevalence;
    if (prevalence !== null) {
        rows.push(["prevalence lower", prevalence.lower_percent]);
        rows.push(["prevalence upper", prevalence.upper_percent]);
        rows.push(["sample size", String(prevalence.n_sample)]);
        if (prevalence.extrapolated_low !== null && prevalence.extrapolated_high !== null) {
            rows.push([
                "extrapolated accounts",
                `${prevalence.extrapolated_low}-${prevalence.extrapolated_high}`,
            ]);
        }
        if (prevalence.tweet_lower_percent !== null && prevalence.tweet_upper_percent !== null) {
            rows.push([
                "tweet share",
                `${prevalence.tweet_lower_percent}-${prevalence.tweet_upper_percent}`,
            ]);
        }
    }
    return rows;
}
/**
 * Poll /api/stats on a fixed interval.  On failure the last payload is kept
 * on screen with a staleness marker rather than blanking the panel.
 */
export class StatsPoller {
    api;
    render;
    intervalMs;
    last = null;
    timer = null;
    constructor(api, render, intervalMs = 5000) {
        this.api = api;
        this.render = render;
        this.intervalMs = intervalMs;
    }
    async tick() {
        try {
            this.last = await this.api.stats();
            this.render(this.last, false);
        }
        catch {
            this.render(this.last, true);
        }
    }
    start() {
        if (this.timer !== null)
            return;
        void this.tick();
        this.timer = setInterval(() => void this.tick(), this.intervalMs);
    }
    stop() {
        if (this.timer !== null) {
            clearInterval(this.timer);
            this.timer = null;
        }
    }
}
