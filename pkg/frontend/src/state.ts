/** Dashboard view state and filter validation against API enums. */

import { RISK_LEVELS, SOURCE_TYPES, STRIDE_CATEGORIES } from "./types.js";

export const VIEWS = ["Intel", "Matrix", "Landscape", "Graph", "Plans", "Stride", "Config"] as const;
export type View = (typeof VIEWS)[number];

export interface Filters {
  level?: string;
  stride?: string;
  source?: string;
}

export class ViewState {
  activeView: View = "Intel";
  filters: Filters = {};
  selectedEntityId: string | null = null;

  setView(view: View): void {
    if (!VIEWS.includes(view)) throw new Error(`unknown view: ${view}`);
    this.activeView = view;
  }

  setFilters(filters: Filters): void {
    if (filters.level && !(RISK_LEVELS as string[]).includes(filters.level)) {
      throw new Error(`invalid level filter: ${filters.level}`);
    }
    if (filters.stride && !(STRIDE_CATEGORIES as readonly string[]).includes(filters.stride)) {
      throw new Error(`invalid stride filter: ${filters.stride}`);
    }
    if (filters.source && !(SOURCE_TYPES as readonly string[]).includes(filters.source)) {
      throw new Error(`invalid source filter: ${filters.source}`);
    }
    this.filters = { ...filters };
  }

  select(entityId: string | null): void {
    this.selectedEntityId = entityId;
  }
}
