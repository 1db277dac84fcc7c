import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { LinkingSchema, SchemaIndex, parseSchema } from '../src/schema.js';

const here = dirname(fileURLToPath(import.meta.url));

export function loadFixtureSchema(name: string): LinkingSchema {
  const raw = readFileSync(join(here, '..', 'fixtures', `${name}.schema.json`), 'utf-8');
  return parseSchema(raw);
}

export function fixtureIndex(name = 'fewshot_qa'): SchemaIndex {
  return new SchemaIndex(loadFixtureSchema(name));
}

/** Deterministic PRNG so the random-walk suites are reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function pick<T>(rand: () => number, items: T[]): T {
  return items[Math.floor(rand() * items.length)];
}
