/**
 * SVG map rendering: candidate pins for the curation side panel and heat
 * cells for the analytics view.
 *
 * The base layer is a plain graticule over the Latin-America extent (the
 * UI stays fully offline); heat cells come straight from the service's
 * exported feature collection and are never recomputed client-side.
 */

import type { GeoEntry, HeatmapCollection } from './api.js';
import { escapeHtml } from './highlight.js';

export interface MapExtent {
  lonMin: number;
  latMin: number;
  lonMax: number;
  latMax: number;
}

export const LATAM_EXTENT: MapExtent = { lonMin: -120, latMin: -60, lonMax: -30, latMax: 35 };

export interface Projected {
  x: number;
  y: number;
}

export function project(
  lat: number,
  lon: number,
  extent: MapExtent = LATAM_EXTENT,
  width = 600,
  height = 600,
): Projected {
  const x = ((lon - extent.lonMin) / (extent.lonMax - extent.lonMin)) * width;
  const y = ((extent.latMax - lat) / (extent.latMax - extent.latMin)) * height;
  return { x, y };
}

function graticule(extent: MapExtent, width: number, height: number, stepDeg = 10): string {
  const lines: string[] = [];
  for (let lon = Math.ceil(extent.lonMin / stepDeg) * stepDeg; lon <= extent.lonMax; lon += stepDeg) {
    const { x } = project(0, lon, extent, width, height);
    lines.push(`<line class="graticule" x1="${x.toFixed(1)}" y1="0" x2="${x.toFixed(1)}" y2="${height}" />`);
  }
  for (let lat = Math.ceil(extent.latMin / stepDeg) * stepDeg; lat <= extent.latMax; lat += stepDeg) {
    const { y } = project(lat, 0, extent, width, height);
    lines.push(`<line class="graticule" x1="0" y1="${y.toFixed(1)}" x2="${width}" y2="${y.toFixed(1)}" />`);
  }
  return lines.join('');
}

/**
 * Pins for gazetteer candidates of one span. Each pin carries the span key
 * and candidate index so a click issues confirm_location for exactly that
 * server-proposed entry.
 */
export function renderPins(
  spanKey: string,
  candidates: GeoEntry[],
  selectedIndex: number | null = null,
  extent: MapExtent = LATAM_EXTENT,
  width = 600,
  height = 600,
): string {
  return candidates
    .map((entry, index) => {
      const { x, y } = project(entry.lat, entry.lon, extent, width, height);
      const selected = index === selectedIndex ? ' pin-selected' : '';
      return (
        `<g class="pin${selected}" data-testid="pin-${spanKey}-${index}" data-span="${spanKey}" ` +
        `data-index="${index}" transform="translate(${x.toFixed(1)}, ${y.toFixed(1)})">` +
        `<circle r="6" /><title>${escapeHtml(entry.display_name)}, ${escapeHtml(entry.country)}</title></g>`
      );
    })
    .join('');
}

/** Heat cells from the exported GeoJSON; opacity scales with count. */
export function renderHeatCells(
  collection: HeatmapCollection,
  extent: MapExtent = LATAM_EXTENT,
  width = 600,
  height = 600,
): string {
  const counts = collection.features.map((f) => f.properties.count);
  const max = counts.length > 0 ? Math.max(...counts) : 1;
  return collection.features
    .map((feature) => {
      const ring = feature.geometry.coordinates[0]!;
      const lons = ring.map((p) => p[0]!);
      const lats = ring.map((p) => p[1]!);
      const west = Math.min(...lons);
      const east = Math.max(...lons);
      const south = Math.min(...lats);
      const north = Math.max(...lats);
      const topLeft = project(north, west, extent, width, height);
      const bottomRight = project(south, east, extent, width, height);
      const opacity = 0.15 + 0.85 * (feature.properties.count / max);
      return (
        `<rect class="heat-cell" data-count="${feature.properties.count}" ` +
        `x="${topLeft.x.toFixed(1)}" y="${topLeft.y.toFixed(1)}" ` +
        `width="${(bottomRight.x - topLeft.x).toFixed(1)}" height="${(bottomRight.y - topLeft.y).toFixed(1)}" ` +
        `fill-opacity="${opacity.toFixed(3)}">` +
        `<title>${feature.properties.count} events</title></rect>`
      );
    })
    .join('');
}

export function renderMap(
  inner: string,
  extent: MapExtent = LATAM_EXTENT,
  width = 600,
  height = 600,
): string {
  return (
    `<svg class="map" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" ` +
    `data-testid="map" role="img">` +
    `<rect class="map-sea" width="${width}" height="${height}" />` +
    graticule(extent, width, height) +
    inner +
    '</svg>'
  );
}
