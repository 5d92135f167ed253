/**
 * Building categories, prompt templates, and the default template
 * assignment for the six-prompt segmentation protocol: five direct
 * category prompts plus the bare "building" prompt for the all-buildings
 * stream (the sixth category is derived downstream by subtraction).
 */

export const PLACEHOLDER = "[building class]";

export interface Category {
  code: number;
  key: string;
  displayName: string;
}

export const CATEGORIES: Category[] = [
  { code: 1, key: "Apartment", displayName: "Apartment" },
  { code: 2, key: "House", displayName: "House" },
  { code: 3, key: "CenterBuilding", displayName: "Center building" },
  { code: 4, key: "Factory", displayName: "Factory" },
  { code: 5, key: "HighRiseBuilding", displayName: "High-rise building" },
];

export const PROMPT_TEMPLATES: Record<string, string> = {
  TP1: "[building class]",
  TP2: "[building class] from satellite",
  TP3: "Roofs of [building class]",
  TP4: "Roofs of [building class] from satellite",
  TP5: "Overhead shot of the [building class]",
  TP6: "Many [building class] from satellite",
};

/** Template choice per category key (tuned defaults). */
export const DEFAULT_ASSIGNMENTS: Record<string, string> = {
  Apartment: "TP4",
  House: "TP4",
  CenterBuilding: "TP4",
  Factory: "TP6",
  HighRiseBuilding: "TP5",
};

/** Prompt text for the all-buildings stream. */
export const ALL_BUILDINGS_PROMPT = "building";

export function renderPrompt(templateId: string, categoryName: string): string {
  const pattern = PROMPT_TEMPLATES[templateId];
  if (pattern === undefined) {
    throw new Error(`unknown prompt template ${templateId}`);
  }
  return pattern.replace(PLACEHOLDER, categoryName);
}

export function categoryByKey(key: string): Category {
  const found = CATEGORIES.find((c) => c.key === key);
  if (!found) {
    throw new Error(`unknown category ${key}; expected one of ${CATEGORIES.map((c) => c.key).join(", ")}`);
  }
  return found;
}
