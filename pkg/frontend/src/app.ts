// Explorer wiring: instance form, reputation sliders, interactive session
// panel, and the two chart panels. All handlers funnel through `actions`
// so scripted tests can drive the exact code paths the buttons use.

import { ApiClient, ApiError, SessionPayload, PolicyPayload } from "./api.js";
import {
	DEFAULT_FORM,
	InstanceForm,
	ReputationSliders,
	buildInstance,
	clampSlider,
	describeTerminal,
	formatTokens,
	slidersFor,
	toReputationPayload,
} from "./model.js";
import {
	ChartDataError,
	comparisonSeries,
	lineChart,
	seriesToCsv,
	sweepSeriesFromCsv,
	Series,
} from "./charts.js";

type El = HTMLElement & {
	value?: string;
	checked?: boolean;
	disabled?: boolean;
};

export interface App {
	el: Record<string, El>;
	state: {
		form: InstanceForm;
		sliders: ReputationSliders;
		session: SessionPayload | null;
		whatif: { from_round: number; policy: PolicyPayload } | null;
		comparison: Series[] | null;
		sweep: Series[] | null;
	};
	actions: {
		setFormField(field: keyof InstanceForm, value: string): void;
		setSliders(preset: "perfect" | "worst"): void;
		setBetaR(value: number): void;
		setBeta(index: number, value: number): void;
		startSession(): Promise<void>;
		reloadSession(): Promise<void>;
		decide(action: "pay" | "abort"): Promise<void>;
		whatif(): Promise<void>;
		runComparison(config: Record<string, unknown>): Promise<void>;
		loadSweep(path: string): Promise<void>;
		exportComparisonCsv(): string;
		exportSweepCsv(): string;
	};
}

function make(doc: Document, tag: string, cls?: string, text?: string): El {
	const el = doc.createElement(tag) as El;
	if (cls) el.setAttribute("class", cls);
	if (text !== undefined) el.textContent = text;
	return el;
}

export function buildApp(doc: Document, client: ApiClient, mount: El): App {
	const el: Record<string, El> = {};
	const state: App["state"] = {
		form: { ...DEFAULT_FORM },
		sliders: slidersFor(Number(DEFAULT_FORM.rounds)),
		session: null,
		whatif: null,
		comparison: null,
		sweep: null,
	};

	// --- layout ---------------------------------------------------------

	const title = make(doc, "h1", "title", "ransom decision explorer");
	mount.appendChild(title);

	const formSection = make(doc, "section", "panel instance-form");
	formSection.appendChild(make(doc, "h2", "", "attack instance"));
	const formFields: (keyof InstanceForm)[] = [
		"rounds", "dataValue", "totalRansom", "firstRoundFraction",
		"decay", "saleRatio", "recoveryCost", "explicitLosses",
	];
	for (const field of formFields) {
		const row = make(doc, "label", "field");
		row.appendChild(make(doc, "span", "", field));
		const input = make(doc, "input");
		input.setAttribute("name", field);
		input.value = state.form[field];
		input.addEventListener("input", () => actions.setFormField(field, input.value ?? ""));
		row.appendChild(input);
		formSection.appendChild(row);
		el[`form_${field}`] = input;
	}
	el.formErrors = make(doc, "ul", "errors");
	formSection.appendChild(el.formErrors);
	mount.appendChild(formSection);

	const repSection = make(doc, "section", "panel reputation");
	repSection.appendChild(make(doc, "h2", "", "attacker reputation"));
	el.sliderBox = make(doc, "div", "sliders");
	repSection.appendChild(el.sliderBox);
	const presetRow = make(doc, "div", "presets");
	el.perfectBtn = make(doc, "button", "", "perfect");
	el.perfectBtn.addEventListener("click", () => actions.setSliders("perfect"));
	el.worstBtn = make(doc, "button", "", "worst");
	el.worstBtn.addEventListener("click", () => actions.setSliders("worst"));
	presetRow.appendChild(el.perfectBtn);
	presetRow.appendChild(el.worstBtn);
	repSection.appendChild(presetRow);
	mount.appendChild(repSection);

	const sessionSection = make(doc, "section", "panel session");
	sessionSection.appendChild(make(doc, "h2", "", "play the victim"));
	el.startBtn = make(doc, "button", "start", "start session");
	el.startBtn.addEventListener("click", () => void actions.startSession());
	sessionSection.appendChild(el.startBtn);
	el.sessionError = make(doc, "div", "error-panel");
	sessionSection.appendChild(el.sessionError);
	el.sessionInfo = make(doc, "div", "session-info");
	sessionSection.appendChild(el.sessionInfo);
	el.recommendBox = make(doc, "div", "recommendation");
	sessionSection.appendChild(el.recommendBox);
	const decisionRow = make(doc, "div", "decisions");
	el.payBtn = make(doc, "button", "pay", "pay this round");
	el.payBtn.addEventListener("click", () => void actions.decide("pay"));
	el.abortBtn = make(doc, "button", "abort", "refuse and abort");
	el.abortBtn.addEventListener("click", () => void actions.decide("abort"));
	decisionRow.appendChild(el.payBtn);
	decisionRow.appendChild(el.abortBtn);
	sessionSection.appendChild(decisionRow);
	el.historyList = make(doc, "ol", "history");
	sessionSection.appendChild(el.historyList);
	el.terminalBanner = make(doc, "div", "terminal");
	sessionSection.appendChild(el.terminalBanner);
	el.whatifBtn = make(doc, "button", "whatif", "what if (current sliders)");
	el.whatifBtn.addEventListener("click", () => void actions.whatif());
	sessionSection.appendChild(el.whatifBtn);
	el.whatifBox = make(doc, "div", "whatif-result");
	sessionSection.appendChild(el.whatifBox);
	mount.appendChild(sessionSection);

	const chartSection = make(doc, "section", "panel charts");
	chartSection.appendChild(make(doc, "h2", "", "scenario comparison"));
	el.chartError = make(doc, "div", "error-panel");
	chartSection.appendChild(el.chartError);
	el.comparisonChart = make(doc, "div", "chart-box comparison");
	chartSection.appendChild(el.comparisonChart);
	el.sweepError = make(doc, "div", "error-panel");
	chartSection.appendChild(make(doc, "h2", "", "sweep curves"));
	chartSection.appendChild(el.sweepError);
	el.sweepChart = make(doc, "div", "chart-box sweep");
	chartSection.appendChild(el.sweepChart);
	mount.appendChild(chartSection);

	// --- rendering ------------------------------------------------------

	function clear(node: El): void {
		while (node.firstChild) node.removeChild(node.firstChild);
	}

	function renderFormErrors(errors: string[]): void {
		clear(el.formErrors);
		for (const message of errors) {
			el.formErrors.appendChild(make(doc, "li", "form-error", message));
		}
	}

	function renderSliders(): void {
		clear(el.sliderBox);
		const addSlider = (label: string, value: number, onInput: (v: number) => void) => {
			const row = make(doc, "label", "slider");
			row.appendChild(make(doc, "span", "", label));
			const input = make(doc, "input");
			input.setAttribute("type", "range");
			input.setAttribute("min", "0");
			input.setAttribute("max", "1");
			input.setAttribute("step", "0.01");
			input.value = String(value);
			input.addEventListener("input", () => onInput(clampSlider(Number(input.value))));
			const readout = make(doc, "span", "readout", value.toFixed(2));
			row.appendChild(input);
			row.appendChild(readout);
			el.sliderBox.appendChild(row);
			return input;
		};
		el.sliderBetaR = addSlider("key return (beta_r)", state.sliders.betaR, (v) =>
			actions.setBetaR(v),
		);
		state.sliders.betas.forEach((b, i) => {
			el[`sliderBeta${i + 1}`] = addSlider(`sell in round ${i + 1} (beta_${i + 1})`, b, (v) =>
				actions.setBeta(i, v),
			);
		});
	}

	function lossBar(label: string, loss: number, worst: number, highlighted: boolean): El {
		const row = make(doc, "div", `bar ${highlighted ? "recommended" : ""}`);
		row.appendChild(make(doc, "span", "bar-label", label));
		const track = make(doc, "div", "bar-track");
		const fill = make(doc, "div", "bar-fill");
		const width = worst > 0 ? Math.max(1, Math.round((loss / worst) * 100)) : 1;
		fill.setAttribute("style", `width:${width}%`);
		fill.setAttribute("data-loss", String(loss));
		track.appendChild(fill);
		row.appendChild(track);
		row.appendChild(make(doc, "span", "bar-value", formatTokens(loss)));
		return row;
	}

	function renderSession(): void {
		const s = state.session;
		clear(el.sessionInfo);
		clear(el.recommendBox);
		clear(el.historyList);
		el.terminalBanner.textContent = "";
		el.terminalBanner.setAttribute("data-terminal", "");
		if (s === null) {
			el.payBtn.disabled = true;
			el.abortBtn.disabled = true;
			return;
		}
		el.sessionInfo.appendChild(
			make(doc, "div", "round", `session ${s.session_id} — round ${s.current_round} of ${s.instance.n}`),
		);
		const rec = s.recommendation;
		if (rec) {
			const worst = Math.max(rec.pay_expected_loss, rec.abort_expected_loss);
			el.recommendBox.appendChild(
				lossBar("expected loss if you pay", rec.pay_expected_loss, worst, rec.recommended === "pay"),
			);
			el.recommendBox.appendChild(
				lossBar("expected loss if you abort", rec.abort_expected_loss, worst, rec.recommended === "abort"),
			);
			el.recommendBox.setAttribute("data-recommended", rec.recommended);
		}
		for (const h of s.history) {
			el.historyList.appendChild(
				make(doc, "li", "event", `round ${h.round}: ${h.decision} -> ${h.event}`),
			);
		}
		el.payBtn.disabled = !s.alive;
		el.abortBtn.disabled = !s.alive;
		if (!s.alive) {
			el.terminalBanner.textContent = describeTerminal(s.terminal);
			el.terminalBanner.setAttribute("data-terminal", s.terminal ?? "");
		}
	}

	function renderWhatif(): void {
		clear(el.whatifBox);
		const w = state.whatif;
		if (w === null) return;
		const abortNow =
			w.policy.abort_round !== "pay_all" && w.policy.abort_round === w.from_round;
		const verdict = abortNow
			? `abort now (round ${w.from_round})`
			: w.policy.abort_round === "pay_all"
				? "pay every remaining round"
				: `pay until round ${w.policy.abort_round}, then abort`;
		el.whatifBox.appendChild(make(doc, "div", "whatif-verdict", verdict));
		el.whatifBox.appendChild(
			make(doc, "div", "whatif-loss",
				`expected remaining loss ${formatTokens(w.policy.expected_loss)}`),
		);
		el.whatifBox.setAttribute("data-abort-round", String(w.policy.abort_round));
	}

	// --- actions ----------------------------------------------------------

	async function guard(target: El, body: () => Promise<void>): Promise<void> {
		target.textContent = "";
		try {
			await body();
		} catch (err) {
			if (err instanceof ApiError || err instanceof ChartDataError) {
				target.textContent = err.message;
			} else {
				target.textContent = `unexpected error: ${err}`;
			}
		}
	}

	const actions: App["actions"] = {
		setFormField(field, value) {
			state.form[field] = value;
			const result = buildInstance(state.form);
			renderFormErrors(result.errors);
			if (field === "rounds" && result.ok && result.instance) {
				state.sliders = slidersFor(result.instance.n);
				renderSliders();
			}
		},

		setSliders(preset) {
			const n = state.sliders.betas.length;
			state.sliders = slidersFor(n, preset);
			renderSliders();
		},

		setBetaR(value) {
			state.sliders.betaR = clampSlider(value);
		},

		setBeta(index, value) {
			state.sliders.betas[index] = clampSlider(value);
		},

		async startSession() {
			await guard(el.sessionError, async () => {
				const result = buildInstance(state.form);
				renderFormErrors(result.errors);
				if (!result.ok || !result.instance) {
					throw new ApiError(0, "fix the instance form first");
				}
				state.session = await client.createSession(
					result.instance, toReputationPayload(state.sliders),
				);
				state.whatif = null;
				if (doc.location) doc.location.hash = state.session.session_id;
				renderSession();
				renderWhatif();
			});
		},

		async reloadSession() {
			await guard(el.sessionError, async () => {
				const fromHash = doc.location ? doc.location.hash.replace(/^#/, "") : "";
				const id = state.session?.session_id ?? fromHash;
				if (!id) throw new ApiError(0, "no session to reload");
				state.session = await client.getSession(id);
				renderSession();
			});
		},

		async decide(action) {
			await guard(el.sessionError, async () => {
				if (!state.session) throw new ApiError(0, "start a session first");
				state.session = await client.decide(state.session.session_id, action);
				renderSession();
			});
		},

		async whatif() {
			await guard(el.sessionError, async () => {
				if (!state.session) throw new ApiError(0, "start a session first");
				state.whatif = await client.whatif(
					state.session.session_id, toReputationPayload(state.sliders),
				);
				renderWhatif();
			});
		},

		async runComparison(config) {
			await guard(el.chartError, async () => {
				const resp = await client.simulate(config);
				state.comparison = comparisonSeries(resp.summary);
				el.comparisonChart.innerHTML = lineChart(state.comparison, {
					xLabel: "round",
					yLabel: "cumulative profit",
				});
			});
		},

		async loadSweep(path) {
			await guard(el.sweepError, async () => {
				const text = await client.fetchText(path);
				state.sweep = sweepSeriesFromCsv(text);
				el.sweepChart.innerHTML = lineChart(state.sweep, {
					xLabel: "total ransom",
					yLabel: "value",
				});
			});
		},

		exportComparisonCsv(): string {
			return state.comparison ? seriesToCsv(state.comparison) : "";
		},

		exportSweepCsv(): string {
			return state.sweep ? seriesToCsv(state.sweep) : "";
		},
	};

	renderSliders();
	renderSession();
	el.comparisonChart.innerHTML = lineChart([], { xLabel: "round", yLabel: "cumulative profit" });
	el.sweepChart.innerHTML = lineChart([], { xLabel: "total ransom", yLabel: "value" });

	return { el, state, actions };
}
