export class ApiError extends Error {
    status;
    constructor(status, message) {
        super(message);
        this.status = status;
        this.name = "ApiError";
    }
}
async function parseJson(response) {
    if (!response.ok) {
        let detail = response.statusText;
        try {
            const body = (await response.json());
            if (body && typeof body.detail === "string")
                detail = body.detail;
        }
        catch {
            // keep the status text
        }
        throw new ApiError(response.status, detail);
    }
    return response.json();
}
/** Thin typed client over the annotation service; never reshapes payloads. */
export class ApiClient {
    fetchImpl;
    base;
    constructor(fetchImpl, base = "") {
        this.fetchImpl = fetchImpl;
        this.base = base;
    }
    async queue(annotator, k) {
        const url = `${this.base}/api/queue?annotator=${encodeURIComponent(annotator)}&k=${k}`;
        const payload = (await parseJson(await this.fetchImpl(url)));
        return payload.candidates;
    }
    async submitLabel(annotator, imageId, category) {
        const response = await this.fetchImpl(`${this.base}/api/labels`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ annotator, image_id: imageId, category }),
        });
        const payload = (await parseJson(response));
        return payload.revision;
    }
    async stats() {
        return (await parseJson(await this.fetchImpl(`${this.base}/api/stats`)));
    }
}
