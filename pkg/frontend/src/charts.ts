/** SVG line charts for per-step neuron activation traces. */

const SVG_NS = "http://www.w3.org/2000/svg";

export interface LineChartOptions {
  width?: number;
  height?: number;
  title?: string;
}

export function lineChart(values: number[], options: LineChartOptions = {}): SVGSVGElement {
  const width = options.width ?? 260;
  const height = options.height ?? 120;
  const padLeft = 34;
  const padBottom = 22;
  const padTop = options.title ? 18 : 8;
  const padRight = 10;
  const plotW = width - padLeft - padRight;
  const plotH = height - padTop - padBottom;

  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const xAt = (i: number) =>
    padLeft + (values.length === 1 ? plotW / 2 : (i / (values.length - 1)) * plotW);
  const yAt = (v: number) => padTop + (1 - (v - lo) / span) * plotH;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("class", "trace-chart");

  const axes = document.createElementNS(SVG_NS, "path");
  axes.setAttribute(
    "d",
    `M ${padLeft} ${padTop} V ${padTop + plotH} H ${padLeft + plotW}`,
  );
  axes.setAttribute("fill", "none");
  axes.setAttribute("stroke", "#888");
  svg.appendChild(axes);

  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute(
    "points",
    values.map((v, i) => `${xAt(i).toFixed(1)},${yAt(v).toFixed(1)}`).join(" "),
  );
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", "#0b6efd");
  line.setAttribute("stroke-width", "1.5");
  svg.appendChild(line);

  values.forEach((v, i) => {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", xAt(i).toFixed(1));
    dot.setAttribute("cy", yAt(v).toFixed(1));
    dot.setAttribute("r", "2.4");
    dot.setAttribute("fill", "#0b6efd");
    dot.setAttribute("class", "trace-point");
    svg.appendChild(dot);
  });

  const label = (text: string, x: number, y: number, cls: string) => {
    const node = document.createElementNS(SVG_NS, "text");
    node.setAttribute("x", String(x));
    node.setAttribute("y", String(y));
    node.setAttribute("class", cls);
    node.setAttribute("font-size", "9");
    node.textContent = text;
    svg.appendChild(node);
  };
  label(String(lo), 2, padTop + plotH, "axis-min");
  label(String(hi), 2, padTop + 8, "axis-max");
  label("step 0", padLeft, height - 6, "axis-x0");
  label(`step ${values.length - 1}`, padLeft + plotW - 28, height - 6, "axis-xT");
  if (options.title) {
    label(options.title, padLeft, 12, "chart-title");
  }
  return svg;
}
