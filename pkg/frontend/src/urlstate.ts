/** App URL scheme: `/#/packages/{id}#<canonical config>`.
 *
 * The whole view state lives in the location hash: a route part naming the
 * package and, after a second '#', the timeline configuration string.
 */

export interface AppLocation {
  packageId: string | null;
  fragment: string;
}

export function parseAppHash(hash: string): AppLocation {
  let h = hash.startsWith("#") ? hash.slice(1) : hash;
  let fragment = "";
  const split = h.indexOf("#");
  if (split >= 0) {
    fragment = h.slice(split + 1);
    h = h.slice(0, split);
  }
  const match = /^\/packages\/([A-Za-z0-9_-]+)\/?$/.exec(h);
  return { packageId: match ? match[1]! : null, fragment };
}

export function buildAppHash(packageId: string, fragment: string): string {
  const base = `#/packages/${packageId}`;
  return fragment ? `${base}#${fragment}` : base;
}
