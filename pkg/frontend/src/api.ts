// Typed client for the ransomgame JSON API. The explorer never re-derives
// model math: every number it renders comes back from these calls.

export interface InstancePayload {
	n: number;
	ransoms: number[];
	data_value: number;
	recovery_cost: number;
	losses?: number[];
	sale_profits?: number[];
	decay?: string;
	sale_ratio?: number;
}

export type ReputationPayload =
	| "perfect"
	| "worst"
	| { beta_r: number; betas: number[] };

export interface PolicyPayload {
	abort_round: number | "pay_all";
	continuation_values: number[];
	expected_loss: number;
}

export interface Recommendation {
	round: number;
	pay_expected_loss: number;
	abort_expected_loss: number;
	recommended: "pay" | "abort";
}

export interface SessionPayload {
	session_id: string;
	instance: InstancePayload;
	reputation: { beta_r: number; betas: number[] };
	seed: number;
	current_round: number;
	alive: boolean;
	terminal: string | null;
	history: { round: number; decision: string; event: string }[];
	recommendation: Recommendation | null;
}

export interface SimulateSummary {
	[mode: string]: {
		total_profit: number;
		mean_profit: number;
		total_loss: number;
		per_round_cumulative: number[];
	};
}

export interface SimulateResponse {
	summary: SimulateSummary;
	artifacts: { [name: string]: string };
}

export class ApiError extends Error {
	status: number;
	field?: string;

	constructor(status: number, message: string, field?: string) {
		super(message);
		this.status = status;
		this.field = field;
	}
}

async function asJson(resp: Response): Promise<any> {
	let doc: any;
	try {
		doc = await resp.json();
	} catch {
		throw new ApiError(resp.status, `non-JSON response (${resp.status})`);
	}
	if (!resp.ok) {
		throw new ApiError(resp.status, doc?.error ?? `HTTP ${resp.status}`, doc?.field);
	}
	return doc;
}

export class ApiClient {
	constructor(readonly base: string) {}

	private async post(path: string, body: unknown): Promise<any> {
		const resp = await fetch(this.base + path, {
			method: "POST",
			headers: { "Content-Type": "application/json" },
			body: JSON.stringify(body),
		});
		return asJson(resp);
	}

	private async get(path: string): Promise<any> {
		return asJson(await fetch(this.base + path));
	}

	async solve(instance: InstancePayload, reputation: ReputationPayload): Promise<PolicyPayload> {
		const doc = await this.post("/v1/solve", { instance, reputation });
		return doc.policy as PolicyPayload;
	}

	async optimize(instance: InstancePayload): Promise<any> {
		return this.post("/v1/optimize", { instance });
	}

	async simulate(config: Record<string, unknown>): Promise<SimulateResponse> {
		const doc = await this.post("/v1/simulate", config);
		if (typeof doc?.summary !== "object") {
			throw new ApiError(500, "simulate response missing summary");
		}
		return doc as SimulateResponse;
	}

	async createSession(
		instance: InstancePayload,
		reputation: ReputationPayload,
		seed?: number,
	): Promise<SessionPayload> {
		return this.post("/v1/sessions", { instance, reputation, seed }) as Promise<SessionPayload>;
	}

	async getSession(id: string): Promise<SessionPayload> {
		return this.get(`/v1/sessions/${id}`) as Promise<SessionPayload>;
	}

	async decide(id: string, action: "pay" | "abort"): Promise<SessionPayload> {
		return this.post(`/v1/sessions/${id}/decision`, { action }) as Promise<SessionPayload>;
	}

	async whatif(
		id: string,
		reputation: ReputationPayload,
	): Promise<{ from_round: number; policy: PolicyPayload }> {
		return this.post(`/v1/sessions/${id}/whatif`, { reputation });
	}

	async fetchText(path: string): Promise<string> {
		const resp = await fetch(this.base + path);
		if (!resp.ok) {
			throw new ApiError(resp.status, `HTTP ${resp.status} for ${path}`);
		}
		return resp.text();
	}
}
