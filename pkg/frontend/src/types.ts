/** Shared wire types; these mirror the annotation service payloads exactly. */

export type Category = 1 | 2 | 3;

export const CATEGORY_NAMES: Record<Category, string> = {
  1: "highly likely generated",
  2: "likely generated",
  3: "not generated",
};

export interface QueueItem {
  image_id: string;
  g: number;
  image_url: string;
}

export interface AnnotatorProgress {
  labeled: number;
  total: number;
}

export interface PrevalencePayload {
  n_sample: number;
  strict_count: number;
  loose_count: number;
  lower_rate: number;
  upper_rate: number;
  lower_percent: string;
  upper_percent: string;
  kappa: number | null;
  extrapolation_base: number | null;
  extrapolated_low: number | null;
  extrapolated_high: number | null;
  tweet_lower_rate: number | null;
  tweet_upper_rate: number | null;
  tweet_lower_percent: string | null;
  tweet_upper_percent: string | null;
}

export interface StatsPayload {
  revision: number;
  n_candidates: number;
  n_doubly_labeled: number;
  annotators: Record<string, AnnotatorProgress>;
  kappa: number | null;
  consensus: { strict: number; loose: number };
  prevalence: PrevalencePayload | null;
}
