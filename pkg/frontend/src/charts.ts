// SVG chart rendering for comparison and sweep data. Charts are pure
// string builders so they can be unit-tested without a DOM; the app drops
// the markup into a container.

import type { SimulateSummary } from "./api.js";

export interface Series {
	name: string;
	points: { x: number; y: number }[];
}

export class ChartDataError extends Error {}

const COLORS = ["#2563eb", "#dc2626", "#16a34a", "#9333ea", "#ea580c", "#0891b2"];

const WIDTH = 640;
const HEIGHT = 320;
const MARGIN = { top: 16, right: 140, bottom: 36, left: 64 };

function esc(text: string): string {
	return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function lineChart(series: Series[], opts: { xLabel: string; yLabel: string }): string {
	if (series.length === 0 || series.every((s) => s.points.length === 0)) {
		return `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" class="chart empty">` +
			`<text x="${WIDTH / 2}" y="${HEIGHT / 2}" text-anchor="middle" class="placeholder">no data</text></svg>`;
	}
	const xs = series.flatMap((s) => s.points.map((p) => p.x));
	const ys = series.flatMap((s) => s.points.map((p) => p.y));
	const xMin = Math.min(...xs);
	const xMax = Math.max(...xs);
	const yMin = Math.min(0, ...ys);
	const yMax = Math.max(...ys);
	const innerW = WIDTH - MARGIN.left - MARGIN.right;
	const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;
	const sx = (x: number) =>
		MARGIN.left + (xMax === xMin ? innerW / 2 : ((x - xMin) / (xMax - xMin)) * innerW);
	const sy = (y: number) =>
		MARGIN.top + (yMax === yMin ? innerH / 2 : innerH - ((y - yMin) / (yMax - yMin)) * innerH);

	const parts: string[] = [];
	parts.push(
		`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" class="chart">`,
	);
	parts.push(
		`<line x1="${MARGIN.left}" y1="${sy(yMin)}" x2="${MARGIN.left + innerW}" y2="${sy(yMin)}" class="axis"/>`,
		`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${MARGIN.top + innerH}" class="axis"/>`,
	);
	for (const frac of [0, 0.5, 1]) {
		const xv = xMin + frac * (xMax - xMin);
		const yv = yMin + frac * (yMax - yMin);
		parts.push(
			`<text x="${sx(xv)}" y="${HEIGHT - 12}" text-anchor="middle" class="tick">${xv.toFixed(0)}</text>`,
			`<text x="${MARGIN.left - 8}" y="${sy(yv) + 4}" text-anchor="end" class="tick">${yv.toFixed(0)}</text>`,
		);
	}
	parts.push(
		`<text x="${MARGIN.left + innerW / 2}" y="${HEIGHT - 1}" text-anchor="middle" class="label">${esc(opts.xLabel)}</text>`,
		`<text x="14" y="${MARGIN.top + innerH / 2}" text-anchor="middle" class="label" transform="rotate(-90 14 ${MARGIN.top + innerH / 2})">${esc(opts.yLabel)}</text>`,
	);
	series.forEach((s, i) => {
		const color = COLORS[i % COLORS.length];
		const path = s.points
			.map((p) => `${sx(p.x).toFixed(1)},${sy(p.y).toFixed(1)}`)
			.join(" ");
		parts.push(
			`<polyline fill="none" stroke="${color}" stroke-width="2" points="${path}" data-series="${esc(s.name)}"/>`,
		);
		const ly = MARGIN.top + 16 * i + 8;
		parts.push(
			`<rect x="${WIDTH - MARGIN.right + 8}" y="${ly - 8}" width="10" height="10" fill="${color}"/>`,
			`<text x="${WIDTH - MARGIN.right + 24}" y="${ly + 1}" class="legend">${esc(s.name)}</text>`,
		);
	});
	parts.push("</svg>");
	return parts.join("");
}

// Per-round cumulative profit lines, one series per mode.
export function comparisonSeries(summary: SimulateSummary): Series[] {
	const modes = Object.keys(summary);
	if (modes.length === 0) {
		throw new ChartDataError("simulate summary has no modes");
	}
	return modes.map((mode) => {
		const entry = summary[mode];
		if (!entry || !Array.isArray(entry.per_round_cumulative)) {
			throw new ChartDataError(`mode ${mode}: missing per_round_cumulative`);
		}
		return {
			name: mode,
			points: entry.per_round_cumulative.map((y, i) => ({ x: i + 1, y })),
		};
	});
}

// Sweep CSV: header "x,<series...>", numeric columns become curves.
export function sweepSeriesFromCsv(text: string): Series[] {
	const lines = text.trim().split(/\r?\n/);
	if (lines.length < 1) throw new ChartDataError("empty sweep file");
	const header = lines[0].split(",");
	if (header[0] !== "x") {
		throw new ChartDataError(`sweep header must start with "x", got "${header[0]}"`);
	}
	const rows = lines.slice(1).map((line) => line.split(","));
	const series: Series[] = [];
	for (let col = 1; col < header.length; col++) {
		const pts: { x: number; y: number }[] = [];
		for (const row of rows) {
			const x = Number(row[0]);
			const y = Number(row[col]);
			if (Number.isFinite(x) && Number.isFinite(y)) {
				pts.push({ x, y });
			}
		}
		if (pts.length > 0) {
			series.push({ name: header[col], points: pts });
		}
	}
	if (series.length === 0) {
		throw new ChartDataError("sweep file has no numeric series");
	}
	return series;
}

export function seriesToCsv(series: Series[]): string {
	const xs = Array.from(new Set(series.flatMap((s) => s.points.map((p) => p.x)))).sort(
		(a, b) => a - b,
	);
	const lines = ["x," + series.map((s) => s.name).join(",")];
	for (const x of xs) {
		const cells = series.map((s) => {
			const pt = s.points.find((p) => p.x === x);
			return pt === undefined ? "" : String(pt.y);
		});
		lines.push([String(x), ...cells].join(","));
	}
	return lines.join("\n") + "\n";
}

// PNG export rasterizes the SVG via a canvas; only meaningful in a real
// browser, so callers should feature-detect.
export function exportPng(svgMarkup: string, doc: Document): Promise<Blob> {
	return new Promise((resolve, reject) => {
		const img = new Image();
		const url = "data:image/svg+xml;base64," + btoa(svgMarkup);
		img.onload = () => {
			const canvas = doc.createElement("canvas");
			canvas.width = WIDTH;
			canvas.height = HEIGHT;
			const ctx = canvas.getContext("2d");
			if (!ctx) {
				reject(new Error("canvas 2d context unavailable"));
				return;
			}
			ctx.drawImage(img, 0, 0);
			canvas.toBlob((blob) =>
				blob ? resolve(blob) : reject(new Error("png encoding failed")),
			);
		};
		img.onerror = () => reject(new Error("svg rasterization failed"));
		img.src = url;
	});
}
