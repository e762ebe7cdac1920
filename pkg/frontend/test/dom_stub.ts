// Minimal structural stand-in for the DOM, enough for the app's wiring:
// element tree, attributes, listeners, value/textContent, innerHTML as an
// opaque string. No layout, no parsing.

export class StubElement {
	tagName: string;
	children: StubElement[] = [];
	parent: StubElement | null = null;
	attrs = new Map<string, string>();
	listeners = new Map<string, ((ev?: unknown) => void)[]>();
	textContent = "";
	value = "";
	checked = false;
	disabled = false;
	innerHTML = "";

	constructor(tag: string) {
		this.tagName = tag.toUpperCase();
	}

	get firstChild(): StubElement | null {
		return this.children[0] ?? null;
	}

	appendChild(child: StubElement): StubElement {
		child.parent = this;
		this.children.push(child);
		return child;
	}

	removeChild(child: StubElement): StubElement {
		const at = this.children.indexOf(child);
		if (at >= 0) this.children.splice(at, 1);
		child.parent = null;
		return child;
	}

	setAttribute(name: string, value: string): void {
		this.attrs.set(name, value);
	}

	getAttribute(name: string): string | null {
		return this.attrs.get(name) ?? null;
	}

	addEventListener(kind: string, handler: (ev?: unknown) => void): void {
		const bucket = this.listeners.get(kind) ?? [];
		bucket.push(handler);
		this.listeners.set(kind, bucket);
	}

	fire(kind: string): void {
		for (const handler of this.listeners.get(kind) ?? []) {
			handler();
		}
	}

	click(): void {
		this.fire("click");
	}

	// depth-first search helpers for assertions
	find(pred: (el: StubElement) => boolean): StubElement | null {
		if (pred(this)) return this;
		for (const child of this.children) {
			const hit = child.find(pred);
			if (hit) return hit;
		}
		return null;
	}

	findAll(pred: (el: StubElement) => boolean, out: StubElement[] = []): StubElement[] {
		if (pred(this)) out.push(this);
		for (const child of this.children) {
			child.findAll(pred, out);
		}
		return out;
	}

	allText(): string {
		return [this.textContent, ...this.children.map((c) => c.allText())].join(" ");
	}
}

export class StubDocument {
	body = new StubElement("body");
	location = { hash: "", origin: "http://stub" };

	createElement(tag: string): StubElement {
		return new StubElement(tag);
	}

	getElementById(_id: string): StubElement | null {
		return this.body;
	}
}

export function stubDom(): { doc: Document; mount: StubElement } {
	const doc = new StubDocument();
	const mount = doc.body;
	return { doc: doc as unknown as Document, mount };
}
