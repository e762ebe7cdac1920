// Scripted explorer session against a live api-server: the same flows the
// browser runs, driven through the app's wiring on a DOM stub (no browser
// binary in this environment). Covers: worst-reputation session with an
// abort recommendation, slider what-if matching /v1/solve on the remaining
// subgame, the comparison chart fed by /v1/simulate, sweep curves fetched
// from a server artifact, reload-mid-session, and terminal rendering.

import assert from "node:assert/strict";
import { after, before, test } from "node:test";
import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ApiClient } from "../src/api.js";
import { buildApp, App } from "../src/app.js";
import { stubDom, StubElement } from "./dom_stub.js";

const PY = process.env.PYTHON ?? "python3";
let server: ChildProcess;
let base = "";
let artifacts = "";

function sleep(ms: number): Promise<void> {
	return new Promise((r) => setTimeout(r, ms));
}

before(async () => {
	artifacts = mkdtempSync(join(tmpdir(), "explorer-artifacts-"));
	const port = 21000 + (process.pid % 20000);
	base = `http://127.0.0.1:${port}`;
	server = spawn(PY, [
		"-m", "ransomgame.cli", "serve",
		"--port", String(port), "--seed", "5", "--out", artifacts,
	], { stdio: ["ignore", "pipe", "inherit"] });
	for (let i = 0; i < 100; i++) {
		try {
			const resp = await fetch(base + "/v1/spec");
			if (resp.ok) return;
		} catch {
			/* not up yet */
		}
		await sleep(100);
	}
	throw new Error("api-server did not come up");
});

after(() => {
	server.kill();
});

function freshApp(): App {
	const { doc, mount } = stubDom();
	return buildApp(doc, new ApiClient(base), mount as any);
}

function bars(app: App): { pay: number; abort: number } {
	const fills = (app.el.recommendBox as unknown as StubElement).findAll(
		(el) => el.getAttribute("data-loss") !== null,
	);
	assert.equal(fills.length, 2);
	return {
		pay: Number(fills[0].getAttribute("data-loss")),
		abort: Number(fills[1].getAttribute("data-loss")),
	};
}

test("worst-reputation session recommends abort at round 1", async () => {
	const app = freshApp();
	app.actions.setSliders("worst");
	await app.actions.startSession();
	assert.ok(app.state.session, "session created");
	const rec = app.state.session!.recommendation!;
	assert.equal(rec.round, 1);
	assert.equal(rec.recommended, "abort");
	const { pay, abort } = bars(app);
	assert.ok(abort < pay, `abort bar (${abort}) must sit strictly below pay (${pay})`);
	assert.equal(
		(app.el.recommendBox as unknown as StubElement).getAttribute("data-recommended"),
		"abort",
	);
});

test("slider what-if at perfect reputation matches /v1/solve on the remaining subgame", async () => {
	const app = freshApp();
	app.actions.setSliders("worst");
	await app.actions.startSession();
	// flip the sliders to the perfect posture and ask the server
	app.actions.setSliders("perfect");
	await app.actions.whatif();
	const whatif = app.state.whatif!;
	assert.equal(whatif.from_round, 1);
	// direct solve over the same instance and reputation
	const client = new ApiClient(base);
	const solved = await client.solve(app.state.session!.instance, "perfect");
	assert.equal(whatif.policy.abort_round, solved.abort_round);
	assert.ok(
		Math.abs(whatif.policy.expected_loss - solved.expected_loss) < 1e-9,
		"expected losses agree",
	);
	// and the session itself was not mutated by the what-if
	assert.equal(app.state.session!.current_round, 1);
	assert.equal(app.state.session!.alive, true);
});

test("what-if with zero return probability recommends aborting now", async () => {
	const app = freshApp();
	await app.actions.startSession(); // perfect sliders by default
	app.actions.setBetaR(0);
	await app.actions.whatif();
	const el = app.el.whatifBox as unknown as StubElement;
	assert.equal(el.getAttribute("data-abort-round"), "1");
	assert.ok(el.allText().includes("abort now"));
});

test("perfect-reputation pay flow reaches round 2 deterministically", async () => {
	const app = freshApp();
	await app.actions.startSession();
	await app.actions.decide("pay");
	const s = app.state.session!;
	assert.equal(s.history[0].event, "key_returned_confidential");
	assert.equal(s.current_round, 2);
	// reload mid-session reproduces the identical view from the server
	const before = JSON.stringify(s);
	await app.actions.reloadSession();
	assert.equal(JSON.stringify(app.state.session), before);
});

test("abort renders a distinct terminal state and blocks further play", async () => {
	const app = freshApp();
	app.actions.setSliders("worst");
	await app.actions.startSession();
	await app.actions.decide("abort");
	assert.equal(app.state.session!.alive, false);
	const banner = app.el.terminalBanner as unknown as StubElement;
	assert.equal(banner.getAttribute("data-terminal"), "aborted");
	assert.ok(banner.textContent.length > 0);
	assert.equal(app.el.payBtn.disabled, true);
	// a further decision surfaces the server's conflict as an inline error
	await app.actions.decide("pay");
	const errorPanel = app.el.sessionError as unknown as StubElement;
	assert.ok(errorPanel.textContent.includes("ended"));
});

test("fig2-style comparison chart renders all four mode series", async () => {
	const app = freshApp();
	await app.actions.runComparison({
		rounds: 8,
		total_ransom: 1000,
		victim_count: 8,
		value_lo: 250,
		value_hi: 350,
		seed: 7,
		modes: ["worst", "perfect_single", "perfect_multi", "optimal_multi"],
	});
	const svg = app.el.comparisonChart.innerHTML;
	for (const mode of ["worst", "perfect_single", "perfect_multi", "optimal_multi"]) {
		assert.ok(svg.includes(`data-series="${mode}"`), `series ${mode} rendered`);
	}
	const csv = app.actions.exportComparisonCsv();
	assert.ok(csv.startsWith("x,"));
	assert.ok(csv.includes("perfect_multi"));
});

test("bad scenario payloads land in the error panel, not the chart", async () => {
	const app = freshApp();
	await app.actions.runComparison({ rounds: 8, value_lo: 10, value_hi: 5 });
	const panel = app.el.chartError as unknown as StubElement;
	assert.ok(panel.textContent.includes("lo <= hi"));
	assert.equal(app.state.comparison, null);
});

test("sweep curves load from a server artifact and reach the high-return region", async () => {
	const sweepDir = join(artifacts, "sweep1");
	const gen = spawnSync(PY, [
		"-m", "ransomgame.cli", "sweep",
		"--data-value", "500", "--rounds", "6", "--decay", "quadratic",
		"--ransom-grid", "400,600,800,1000,1200", "--out", sweepDir,
	]);
	assert.equal(gen.status, 0, String(gen.stderr));
	const app = freshApp();
	await app.actions.loadSweep("/artifacts/sweep1/sweep.csv");
	assert.ok(app.state.sweep, "sweep parsed");
	const rp = app.state.sweep!.find((s) => s.name === "return_prob")!;
	const beyond800 = rp.points.filter((p) => p.x >= 800);
	assert.ok(beyond800.length >= 3);
	assert.ok(beyond800.every((p) => p.y >= 0.9), JSON.stringify(rp.points));
	assert.ok(app.el.sweepChart.innerHTML.includes('data-series="return_prob"'));
	const csv = app.actions.exportSweepCsv();
	assert.ok(csv.split("\n")[0].startsWith("x,"));
});

test("instance form rejects rising losses before any request is made", async () => {
	const app = freshApp();
	app.actions.setFormField("rounds", "3");
	app.actions.setFormField("explicitLosses", "100,150,50");
	const errors = app.el.formErrors as unknown as StubElement;
	assert.ok(errors.allText().includes("non-increasing"));
	await app.actions.startSession();
	assert.equal(app.state.session, null);
});
