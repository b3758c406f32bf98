public class Conflict {
    // Serial: every iteration writes a[0]. conflict/ holds a variant that
    // was forced through the code generator anyway; verify must reject it.
    public static void last(int[] a, int n) {
        for (int i = 0; i < n; i++) a[0] = i;
    }
}
