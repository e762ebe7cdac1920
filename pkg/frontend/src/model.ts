// Form state and validation for the explorer. Validation here is input
// hygiene only (types, ranges, monotone losses); everything economic is
// computed server-side.

import type { InstancePayload, ReputationPayload } from "./api.js";

export interface InstanceForm {
	rounds: string;
	dataValue: string;
	totalRansom: string;
	firstRoundFraction: string;
	decay: string;
	saleRatio: string;
	recoveryCost: string;
	explicitLosses: string; // optional comma list; overrides the decay profile
}

export const DEFAULT_FORM: InstanceForm = {
	rounds: "6",
	dataValue: "500",
	totalRansom: "800",
	firstRoundFraction: "0.5",
	decay: "linear",
	saleRatio: "0.7",
	recoveryCost: "0",
	explicitLosses: "",
};

export interface FormResult {
	ok: boolean;
	errors: string[];
	instance?: InstancePayload;
}

function num(raw: string, name: string, errors: string[], opts: { min?: number; max?: number } = {}): number {
	const value = Number(raw);
	if (raw.trim() === "" || !Number.isFinite(value)) {
		errors.push(`${name} must be a number`);
		return NaN;
	}
	if (opts.min !== undefined && value < opts.min) {
		errors.push(`${name} must be at least ${opts.min}`);
	}
	if (opts.max !== undefined && value > opts.max) {
		errors.push(`${name} must be at most ${opts.max}`);
	}
	return value;
}

export function buildInstance(form: InstanceForm): FormResult {
	const errors: string[] = [];
	const n = num(form.rounds, "rounds", errors, { min: 1 });
	const V = num(form.dataValue, "data value", errors, { min: 0 });
	const total = num(form.totalRansom, "total ransom", errors, { min: 0 });
	const frac = num(form.firstRoundFraction, "first-round fraction", errors, { min: 0, max: 1 });
	const ratio = num(form.saleRatio, "sale ratio", errors, { min: 0, max: 1 });
	const recovery = num(form.recoveryCost, "recovery cost", errors, { min: 0 });
	if (errors.length > 0 || !Number.isInteger(n)) {
		if (!Number.isInteger(n)) errors.push("rounds must be an integer");
		return { ok: false, errors };
	}

	const first = frac * total;
	const ransoms =
		n === 1 ? [total] : [first, ...Array(n - 1).fill((total - first) / (n - 1))];
	if (ransoms.some((r) => r <= 0)) {
		errors.push("every round's ransom must be positive");
	}

	const instance: InstancePayload = {
		n,
		ransoms,
		data_value: V,
		recovery_cost: recovery,
		decay: form.decay,
		sale_ratio: ratio,
	};

	if (form.explicitLosses.trim() !== "") {
		const losses = form.explicitLosses.split(",").map((s) => Number(s.trim()));
		if (losses.some((x) => !Number.isFinite(x) || x < 0)) {
			errors.push("losses must be non-negative numbers");
		} else if (losses.length !== n) {
			errors.push(`losses must have exactly ${n} entries`);
		} else {
			for (let i = 1; i < losses.length; i++) {
				if (losses[i] > losses[i - 1]) {
					errors.push(`losses must be non-increasing (rises at entry ${i + 1})`);
					break;
				}
			}
			instance.losses = losses;
			instance.sale_profits = losses.map((x) => ratio * x);
		}
	}

	return errors.length > 0 ? { ok: false, errors } : { ok: true, errors: [], instance };
}

export function clampSlider(value: number): number {
	if (!Number.isFinite(value)) return 0;
	return Math.min(1, Math.max(0, value));
}

export interface ReputationSliders {
	betaR: number;
	betas: number[];
}

export function slidersFor(n: number, preset: "perfect" | "worst" | null = null): ReputationSliders {
	if (preset === "worst") return { betaR: 0, betas: Array(n).fill(1) };
	return { betaR: 1, betas: Array(n).fill(0) };
}

export function toReputationPayload(s: ReputationSliders): ReputationPayload {
	return { beta_r: clampSlider(s.betaR), betas: s.betas.map(clampSlider) };
}

export function describeTerminal(terminal: string | null): string {
	switch (terminal) {
		case "key_withheld":
			return "Key withheld: the deposit path failed, data is gone.";
		case "data_sold":
			return "Data sold: the attacker monetized the data.";
		case "schedule_complete":
			return "Schedule complete: every round paid, data stayed confidential.";
		case "aborted":
			return "Aborted: payments stopped, the attacker sold the data.";
		default:
			return "";
	}
}

export function formatTokens(x: number): string {
	return x.toFixed(2);
}
