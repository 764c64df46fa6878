import { describe, expect, it } from 'vitest';

import type { HeatmapCollection } from '../src/api.js';
import { LATAM_EXTENT, project, renderHeatCells, renderMap, renderPins } from '../src/map.js';

describe('map projection', () => {
  it('maps the extent corners to the canvas corners', () => {
    expect(project(LATAM_EXTENT.latMax, LATAM_EXTENT.lonMin)).toEqual({ x: 0, y: 0 });
    expect(project(LATAM_EXTENT.latMin, LATAM_EXTENT.lonMax)).toEqual({ x: 600, y: 600 });
  });

  it('is monotone: east of means greater x, north of means smaller y', () => {
    const montevideo = project(-34.9, -56.19);
    const mexico = project(19.4326, -99.1332);
    expect(mexico.x).toBeLessThan(montevideo.x);
    expect(mexico.y).toBeLessThan(montevideo.y);
  });
});

describe('pins', () => {
  const candidates = [
    { name: 'montevideo', display_name: 'Montevideo', lat: -34.9, lon: -56.19, country: 'UY', feature: 'city' },
    { name: 'montevideo', display_name: 'Montevideo', lat: 44.94, lon: -95.72, country: 'US', feature: 'city' },
  ];

  it('renders one pin per candidate with span and index', () => {
    const svg = renderPins('0:2:3', candidates);
    expect(svg).toContain('data-testid="pin-0:2:3-0"');
    expect(svg).toContain('data-testid="pin-0:2:3-1"');
    expect(svg).toContain('Montevideo, UY');
  });

  it('marks the confirmed candidate', () => {
    const svg = renderPins('0:2:3', candidates, 0);
    expect(svg.indexOf('pin-selected')).toBeLessThan(svg.indexOf('data-testid="pin-0:2:3-1"'));
  });
});

describe('heat cells', () => {
  const collection: HeatmapCollection = {
    type: 'FeatureCollection',
    features: [
      {
        type: 'Feature',
        geometry: {
          type: 'Polygon',
          coordinates: [[[-57, -35], [-56, -35], [-56, -34], [-57, -34], [-57, -35]]],
        },
        properties: { row: 25, col: 63, count: 4 },
      },
      {
        type: 'Feature',
        geometry: {
          type: 'Polygon',
          coordinates: [[[-100, 19], [-99, 19], [-99, 20], [-100, 20], [-100, 19]]],
        },
        properties: { row: 79, col: 20, count: 1 },
      },
    ],
  };

  it('renders one rect per exported cell, nothing recomputed', () => {
    const svg = renderHeatCells(collection);
    expect((svg.match(/<rect/g) ?? []).length).toBe(2);
    expect(svg).toContain('data-count="4"');
    expect(svg).toContain('data-count="1"');
  });

  it('scales opacity by count', () => {
    const svg = renderHeatCells(collection);
    const dense = /data-count="4"[^>]*fill-opacity="([\d.]+)"/.exec(svg)?.[1];
    const sparse = /data-count="1"[^>]*fill-opacity="([\d.]+)"/.exec(svg)?.[1];
    expect(Number(dense)).toBeGreaterThan(Number(sparse));
  });

  it('wraps everything in a base-layer svg', () => {
    const svg = renderMap(renderHeatCells(collection));
    expect(svg).toContain('data-testid="map"');
    expect(svg).toContain('class="graticule"');
  });
});
