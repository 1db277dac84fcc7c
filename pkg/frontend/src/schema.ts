/*
 * Linking-schema types and lookup index.
 *
 * The schema file is produced by the linking engine (version "1"); all
 * geometry in it is final. The overlay never invents boxes of its own.
 */

export interface NormalizedBox {
  page: number;
  x: number;
  y: number;
  w: number;
  h: number;
}

export type Target =
  | { granularity: 'cell'; cells: string[] }
  | { granularity: 'row'; row: number }
  | { granularity: 'column'; col: number }
  | { granularity: 'region'; rect: [number, number, number, number] };

export interface SchemaMention {
  id: string;
  span: [number, number];
  type: string;
  mechanism: string;
  evidence: Record<string, unknown>;
  target: Target;
  boxes: NormalizedBox[];
}

export interface SchemaRegion {
  target: Target;
  boxes: NormalizedBox[];
}

export interface SchemaSentence {
  id: string;
  span: [number, number];
  sentence_boxes: NormalizedBox[];
  regions: SchemaRegion[];
  mentions: SchemaMention[];
}

export interface SchemaPair {
  paragraph_id: string;
  table_id: string;
  reference_spans: [number, number][];
  sentences: SchemaSentence[];
}

export interface LinkingSchema {
  version: string;
  doc_id: string;
  content_hash: string;
  pairs: SchemaPair[];
  warnings?: string[];
}

export const SUPPORTED_VERSION = '1';

export function parseSchema(json: string): LinkingSchema {
  const raw = JSON.parse(json) as LinkingSchema;
  if (raw.version !== SUPPORTED_VERSION) {
    throw new Error(`unsupported schema version: ${raw.version}`);
  }
  if (!Array.isArray(raw.pairs)) {
    throw new Error('schema has no pairs list');
  }
  return raw;
}

/** Stable identifier for a pair (the schema itself keys pairs by position). */
export function pairId(pair: SchemaPair): string {
  return `${pair.paragraph_id}::${pair.table_id}`;
}

/** Precomputed lookups the state machine and overlay share. */
export class SchemaIndex {
  readonly schema: LinkingSchema;
  private readonly pairsById = new Map<string, SchemaPair>();
  private readonly sentencesById = new Map<string, SchemaSentence>();
  private readonly pairOfSentence = new Map<string, string>();
  private readonly mentionsById = new Map<string, SchemaMention>();
  private readonly sentenceOfMention = new Map<string, string>();

  constructor(schema: LinkingSchema) {
    this.schema = schema;
    for (const pair of schema.pairs) {
      const pid = pairId(pair);
      this.pairsById.set(pid, pair);
      for (const sentence of pair.sentences) {
        this.sentencesById.set(sentence.id, sentence);
        this.pairOfSentence.set(sentence.id, pid);
        for (const mention of sentence.mentions) {
          this.mentionsById.set(mention.id, mention);
          this.sentenceOfMention.set(mention.id, sentence.id);
        }
      }
    }
  }

  pairIds(): string[] {
    return [...this.pairsById.keys()];
  }

  pair(id: string): SchemaPair | undefined {
    return this.pairsById.get(id);
  }

  sentence(id: string): SchemaSentence | undefined {
    return this.sentencesById.get(id);
  }

  mention(id: string): SchemaMention | undefined {
    return this.mentionsById.get(id);
  }

  pairOf(sentenceId: string): string | undefined {
    return this.pairOfSentence.get(sentenceId);
  }

  sentenceOf(mentionId: string): string | undefined {
    return this.sentenceOfMention.get(mentionId);
  }
}
